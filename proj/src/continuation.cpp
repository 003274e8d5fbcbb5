#include "vortex/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace vortex {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_state(const PolarState& s) {
  if (s.r.size() != s.theta.size()) {
    throw Error(ErrorKind::DimensionMismatch, "r and theta must have the same length");
  }
  if (s.r.empty()) throw Error(ErrorKind::InvalidN, "need at least one weak vortex");
}

// All N+1 positions, index 0 being the strong vortex.
std::vector<Complex> all_positions(const PolarState& s, double epsilon, double collision_sep) {
  check_state(s);
  const auto weak = weak_positions(s);
  std::vector<Complex> z;
  z.reserve(weak.size() + 1);
  z.push_back(strong_position(weak, epsilon));
  z.insert(z.end(), weak.begin(), weak.end());
  for (std::size_t a = 0; a < z.size(); ++a) {
    for (std::size_t b = a + 1; b < z.size(); ++b) {
      if (std::abs(z[a] - z[b]) < collision_sep) {
        std::ostringstream msg;
        msg << "vortices " << a << " and " << b << " closer than " << collision_sep;
        throw Error(ErrorKind::VortexCollision, msg.str());
      }
    }
  }
  return z;
}

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// The residual rotated into each vortex's own (radial, tangential) frame,
// e^{-i theta_j} R_j. Same zero set as the Cartesian residual, but the
// O(epsilon) tangential mismatch of a trial radius no longer leaks into the
// angle columns of the Jacobian, so Newton steps in theta stay O(epsilon).
Vector local_frame(const PolarState& s, const Vector& cartesian) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Vector out(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex loc = std::polar(1.0, -s.theta[static_cast<std::size_t>(j)]) * Complex(cartesian(j), cartesian(n + j));
    out(j) = loc.real();
    out(n + j) = loc.imag();
  }
  return out;
}

Matrix local_frame_jacobian(const PolarState& s, const Vector& cartesian, const Matrix& jac) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix out(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex rot = std::polar(1.0, -s.theta[static_cast<std::size_t>(j)]);
    for (Eigen::Index c = 0; c < 2 * n; ++c) {
      const Complex d = rot * Complex(jac(j, c), jac(n + j, c));
      out(j, c) = d.real();
      out(n + j, c) = d.imag();
    }
    const Complex extra = -kI * rot * Complex(cartesian(j), cartesian(n + j));
    out(j, n + j) += extra.real();
    out(n + j, n + j) += extra.imag();
  }
  return out;
}

}  // namespace

std::vector<Complex> weak_positions(const PolarState& s) {
  std::vector<Complex> z(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) z[j] = std::polar(s.r[j], s.theta[j]);
  return z;
}

Complex strong_position(const std::vector<Complex>& weak, double epsilon) {
  Complex sum{0.0, 0.0};
  for (const auto& z : weak) sum += z;
  return -epsilon * sum;
}

std::vector<Complex> RelativeEquilibrium::weak_positions() const { return vortex::weak_positions(state()); }

Complex RelativeEquilibrium::strong_position() const {
  return vortex::strong_position(weak_positions(), epsilon);
}

std::vector<Complex> weak_velocities(const PolarState& s, double epsilon, double collision_sep) {
  const auto z = all_positions(s, epsilon, collision_sep);
  const std::size_t n = s.size();
  std::vector<Complex> v(n);
  for (std::size_t j = 1; j <= n; ++j) {
    Complex acc = 1.0 / std::conj(z[j] - z[0]);
    Complex weak_sum{0.0, 0.0};
    for (std::size_t k = 1; k <= n; ++k) {
      if (k != j) weak_sum += 1.0 / std::conj(z[j] - z[k]);
    }
    v[j - 1] = kI * (acc + epsilon * weak_sum);
  }
  return v;
}

ComplexMatrix weak_velocity_jacobian(const PolarState& s, double epsilon, double collision_sep) {
  const auto z = all_positions(s, epsilon, collision_sep);
  const auto n = static_cast<Eigen::Index>(s.size());
  // inv2(j, k) = 1 / conj(z_j - z_k)^2, rows are weak vortices 1..N, k = 0..N.
  ComplexMatrix inv2 = ComplexMatrix::Zero(n, n + 1);
  ComplexVector weak_row_sum = ComplexVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k <= n; ++k) {
      if (k == j + 1) continue;
      const Complex w = std::conj(z[static_cast<std::size_t>(j + 1)] - z[static_cast<std::size_t>(k)]);
      inv2(j, k) = 1.0 / (w * w);
      if (k >= 1) weak_row_sum(j) += inv2(j, k);
    }
  }
  // With v_j = i sum_k Gamma_k / conj(w_jk), a perturbation dz gives
  // dv_j = -i sum_k Gamma_k conj(dz_j - dz_k) / conj(w_jk)^2.
  ComplexMatrix jac = ComplexMatrix::Zero(n, 2 * n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double theta_m = s.theta[static_cast<std::size_t>(m)];
    const Complex dz_dr = std::polar(1.0, theta_m);
    const Complex dz_dtheta = kI * z[static_cast<std::size_t>(m + 1)];
    for (int which = 0; which < 2; ++which) {
      const Complex d = which == 0 ? dz_dr : dz_dtheta;
      const Complex d0 = -epsilon * d;  // the strong vortex follows the centre of vorticity
      const Eigen::Index col = which == 0 ? m : n + m;
      for (Eigen::Index j = 0; j < n; ++j) {
        Complex acc;
        if (j == m) {
          acc = epsilon * std::conj(d) * weak_row_sum(j) + std::conj(d - d0) * inv2(j, 0);
        } else {
          acc = epsilon * std::conj(-d) * inv2(j, m + 1) + std::conj(-d0) * inv2(j, 0);
        }
        jac(j, col) = -kI * acc;
      }
    }
  }
  return jac;
}

Vector rotating_frame_residual(const PolarState& s, double epsilon, double omega,
                               double collision_sep) {
  const auto v = weak_velocities(s, epsilon, collision_sep);
  const auto z = weak_positions(s);
  const auto n = static_cast<Eigen::Index>(s.size());
  Vector res(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex rj = kI * omega * z[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>(j)];
    res(j) = rj.real();
    res(n + j) = rj.imag();
  }
  return res;
}

Matrix rotating_frame_residual_jacobian(const PolarState& s, double epsilon, double omega,
                                        double collision_sep) {
  const ComplexMatrix dv = weak_velocity_jacobian(s, epsilon, collision_sep);
  const auto z = weak_positions(s);
  const auto n = static_cast<Eigen::Index>(s.size());
  ComplexMatrix dres = -dv;
  for (Eigen::Index m = 0; m < n; ++m) {
    dres(m, m) += kI * omega * std::polar(1.0, s.theta[static_cast<std::size_t>(m)]);
    dres(m, n + m) += kI * omega * (kI * z[static_cast<std::size_t>(m)]);
  }
  Matrix jac(2 * n, 2 * n);
  jac.topRows(n) = dres.real();
  jac.bottomRows(n) = dres.imag();
  return jac;
}

bool is_ngon(const AngularConfig& theta, double tol) {
  if (theta.size() < 2) return false;
  const double expected = 2.0 * std::numbers::pi / static_cast<double>(theta.size());
  const auto gaps = circular_gaps(theta);
  return std::all_of(gaps.begin(), gaps.end(), [&](double g) { return std::abs(g - expected) < tol; });
}

double epsilon_ceiling_for(const CriticalPoint& cp, const ContinuationOptions& opts) {
  if (is_ngon(cp.config, opts.ngon_tol)) {
    const double n = static_cast<double>(cp.config.size());
    return std::min(opts.epsilon_ceiling, 1.0 / (n * n));
  }
  return opts.epsilon_ceiling;
}

RelativeEquilibrium ngon_equilibrium(int n, double epsilon) {
  if (n < 2) throw Error(ErrorKind::InvalidN, "ngon_equilibrium needs N >= 2");
  const double r2 = 1.0 + epsilon * (n - 1) / 2.0;
  if (!(r2 > 0.0)) throw Error(ErrorKind::InvalidEpsilon, "N-gon radius is imaginary for this epsilon");
  RelativeEquilibrium eq;
  eq.source = make_critical_point(ngon(n));
  eq.theta = eq.source.config.angles;
  eq.r.assign(static_cast<std::size_t>(n), std::sqrt(r2));
  eq.epsilon = epsilon;
  eq.omega = 1.0;
  eq.residual = sup_norm(rotating_frame_residual(eq.state(), epsilon, 1.0));
  return eq;
}

RelativeEquilibrium continue_equilibrium(const CriticalPoint& cp, double epsilon,
                                         const ContinuationOptions& opts,
                                         const std::optional<PolarState>& warm_start) {
  if (epsilon == 0.0 || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidEpsilon, "epsilon must be finite and nonzero");
  }
  const double ceiling = epsilon_ceiling_for(cp, opts);
  if (std::abs(epsilon) > ceiling) {
    std::ostringstream msg;
    msg << "|epsilon| = " << std::abs(epsilon) << " exceeds the ceiling " << ceiling;
    throw Error(ErrorKind::InvalidEpsilon, msg.str());
  }
  const MorseIndex idx = morse_counts(cp.spectrum);
  if (idx.zero >= 2) {
    throw Error(ErrorKind::DegenerateSeed, "seed Hessian has more than one zero eigenvalue");
  }

  const std::size_t n = cp.config.size();
  const std::vector<double>& phi = cp.config.angles;
  PolarState s = warm_start.value_or(PolarState{std::vector<double>(n, 1.0), phi});
  if (s.size() != n) throw Error(ErrorKind::DimensionMismatch, "warm start has the wrong size");

  const auto ni = static_cast<Eigen::Index>(n);
  auto full_residual = [&](const PolarState& st) {
    Vector f(2 * ni + 1);
    f.head(2 * ni) = local_frame(st, rotating_frame_residual(st, epsilon, 1.0, opts.collision_sep));
    double phase = 0.0;
    for (std::size_t j = 0; j < n; ++j) phase += st.theta[j] - phi[j];
    f(2 * ni) = phase;
    return f;
  };

  Vector f;
  try {
    f = full_residual(s);
  } catch (const Error& e) {
    throw Error(ErrorKind::CollisionApproach, e.what());
  }

  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    const double rsup = sup_norm(rotating_frame_residual(s, epsilon, 1.0, opts.collision_sep));
    if (rsup < opts.releq_tol && std::abs(f(2 * ni)) < 1e-10) {
      double drift = 0.0;
      for (std::size_t j = 0; j < n; ++j) drift = std::max(drift, std::abs(s.theta[j] - phi[j]));
      if (drift > opts.max_angle_drift) {
        std::ostringstream msg;
        msg << "converged to an equilibrium whose angles moved " << drift << " rad from the seed";
        throw Error(ErrorKind::NoConvergence, msg.str());
      }
      RelativeEquilibrium eq;
      eq.r = s.r;
      eq.theta = s.theta;
      eq.epsilon = epsilon;
      eq.omega = 1.0;
      eq.residual = rsup;
      eq.source = cp;
      return eq;
    }
    if (iter == opts.max_iterations) break;

    Matrix jac(2 * ni + 1, 2 * ni);
    jac.topRows(2 * ni) = local_frame_jacobian(
        s, rotating_frame_residual(s, epsilon, 1.0, opts.collision_sep),
        rotating_frame_residual_jacobian(s, epsilon, 1.0, opts.collision_sep));
    jac.row(2 * ni).setZero();
    jac.row(2 * ni).tail(ni).setOnes();
    const Vector step = jac.colPivHouseholderQr().solve(-f);

    const double f0 = f.squaredNorm();
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      PolarState trial = s;
      for (std::size_t j = 0; j < n; ++j) {
        trial.r[j] += t * step(static_cast<Eigen::Index>(j));
        trial.theta[j] += t * step(ni + static_cast<Eigen::Index>(j));
      }
      if (std::any_of(trial.r.begin(), trial.r.end(), [](double r) { return !(r > 0.0); })) continue;
      Vector f1;
      try {
        f1 = full_residual(trial);
      } catch (const Error&) {
        continue;
      }
      if (f1.squaredNorm() < f0 || (t == 1.0 && sup_norm(f1.head(2 * ni)) < 0.5 * opts.releq_tol)) {
        s = std::move(trial);
        f = std::move(f1);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "Newton line search stalled at |residual|_inf = " << rsup;
      throw Error(ErrorKind::NoConvergence, msg.str());
    }
  }
  std::ostringstream msg;
  msg << "no convergence after " << opts.max_iterations << " Newton iterations (|residual|_inf = "
      << sup_norm(rotating_frame_residual(s, epsilon, 1.0, opts.collision_sep)) << ")";
  throw Error(ErrorKind::NoConvergence, msg.str());
}

SweepResult sweep_epsilon(const CriticalPoint& cp, const std::vector<double>& eps_list,
                          const ContinuationOptions& opts) {
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (eps_list[k] == 0.0) throw Error(ErrorKind::InvalidEpsilon, "epsilon list contains 0");
    if (k > 0 && std::abs(eps_list[k]) < std::abs(eps_list[k - 1])) {
      throw Error(ErrorKind::InvalidEpsilon, "epsilon list must be sorted by |epsilon| ascending");
    }
  }
  SweepResult out;
  std::optional<PolarState> last_positive;
  std::optional<PolarState> last_negative;
  for (double eps : eps_list) {
    auto& warm = eps > 0.0 ? last_positive : last_negative;
    try {
      out.equilibria.push_back(continue_equilibrium(cp, eps, opts, warm));
    } catch (const Error& e) {
      out.failure = e;
      break;
    }
    warm = out.equilibria.back().state();
  }
  return out;
}

ScalingReport verify_scaling_bounds(const std::vector<RelativeEquilibrium>& family) {
  if (family.size() < 3) {
    throw Error(ErrorKind::InsufficientFamily, "need at least three equilibria");
  }
  const bool positive = family.front().epsilon > 0.0;
  std::set<double> magnitudes;
  for (const auto& eq : family) {
    if ((eq.epsilon > 0.0) != positive || eq.epsilon == 0.0) {
      throw Error(ErrorKind::InsufficientFamily, "family mixes signs of epsilon");
    }
    magnitudes.insert(std::abs(eq.epsilon));
  }
  if (magnitudes.size() < 3) {
    throw Error(ErrorKind::InsufficientFamily, "need at least three distinct |epsilon|");
  }

  ScalingReport rep;
  for (const auto& eq : family) {
    const double ae = std::abs(eq.epsilon);
    const auto weak = eq.weak_positions();
    double rmax = 0.0;
    for (const auto& z : weak) rmax = std::max(rmax, std::abs(std::norm(z) - 1.0));
    rep.epsilon.push_back(eq.epsilon);
    rep.strong_ratio.push_back(std::abs(strong_position(weak, eq.epsilon)) / ae);
    rep.radius_ratio.push_back(rmax / ae);
  }
  // Ratios that vanish to roundoff (e.g. |q_0| for a symmetric ring) are
  // trivially bounded.
  auto spread = [](const std::vector<double>& v) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    if (*mx < 1e-9) return 1.0;
    if (*mn <= 0.0) return std::numeric_limits<double>::infinity();
    return *mx / *mn;
  };
  rep.strong_spread = spread(rep.strong_ratio);
  rep.radius_spread = spread(rep.radius_ratio);
  rep.bounded = rep.strong_spread < 10.0 && rep.radius_spread < 10.0;
  return rep;
}

}  // namespace vortex
