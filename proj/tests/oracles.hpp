#pragma once

// Reference computations written independently of the library, used as
// oracles by the unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline constexpr double kPi = std::numbers::pi;

// Limit potential straight from the pair sum.
inline double potential(const Vec& th) {
  double v = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    for (std::size_t j = i + 1; j < th.size(); ++j) {
      const double d = th[j] - th[i];
      v -= std::cos(d) + 0.5 * std::log(2.0 - 2.0 * std::cos(d));
    }
  }
  return v;
}

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Vec p = x;
    Vec m = x;
    p[k] += h;
    m[k] -= h;
    g[k] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

// Column k holds the central difference of g along coordinate k.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& x, double h) {
  const Vec g0 = g(x);
  Mat jac(g0.size(), Vec(x.size(), 0.0));
  for (std::size_t k = 0; k < x.size(); ++k) {
    Vec p = x;
    Vec m = x;
    p[k] += h;
    m[k] -= h;
    const Vec gp = g(p);
    const Vec gm = g(m);
    for (std::size_t i = 0; i < g0.size(); ++i) jac[i][k] = (gp[i] - gm[i]) / (2.0 * h);
  }
  return jac;
}

// Gaussian elimination with partial pivoting.
inline double determinant(Mat a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// N angles with every circular gap at least min_gap, in increasing order.
inline Vec random_angles(std::size_t n, std::mt19937_64& rng, double min_gap = 0.05) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - u(rng));
    total += x;
  }
  const double free = 2.0 * kPi - static_cast<double>(n) * min_gap;
  Vec th(n);
  double acc = 2.0 * kPi * u(rng);
  for (std::size_t k = 0; k < n; ++k) {
    th[k] = acc;
    acc += min_gap + free * w[k] / total;
  }
  return th;
}

inline double ngon_radius(int n, double eps) { return std::sqrt(1.0 + eps * (n - 1) / 2.0); }

// Planar velocities of point vortices in real arithmetic:
// u_j = sum_i G_i (-(y_j - y_i), x_j - x_i) / |q_j - q_i|^2.
inline std::vector<std::array<double, 2>> velocities(const std::vector<std::array<double, 2>>& q,
                                                      const Vec& gamma) {
  std::vector<std::array<double, 2>> u(q.size(), {0.0, 0.0});
  for (std::size_t j = 0; j < q.size(); ++j) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (i == j) continue;
      const double dx = q[j][0] - q[i][0];
      const double dy = q[j][1] - q[i][1];
      const double d2 = dx * dx + dy * dy;
      u[j][0] += gamma[i] * -dy / d2;
      u[j][1] += gamma[i] * dx / d2;
    }
  }
  return u;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(const Vec& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace oracle
