#include "vortex/limit_potential.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

void check_size(const AngularConfig& theta) {
  if (theta.size() < 2) throw Error(ErrorKind::InvalidN, "need at least two angles");
}

// 2 - 2 cos(d) written as 4 sin^2(d/2), which keeps full relative accuracy near
// a collision.
double chord_sq(double d) {
  const double s = std::sin(0.5 * d);
  return 4.0 * s * s;
}

void check_collisions(const AngularConfig& theta, const PotentialOptions& opts) {
  check_size(theta);
  const double sep = min_chord(theta);
  if (sep < opts.collision_sep) {
    std::ostringstream msg;
    msg << "minimum chord " << sep << " below " << opts.collision_sep;
    throw Error(ErrorKind::AngularCollision, msg.str());
  }
}

}  // namespace

Vector AngularConfig::as_vector() const {
  return Eigen::Map<const Vector>(angles.data(), static_cast<Eigen::Index>(angles.size()));
}

AngularConfig AngularConfig::from_vector(const Vector& v) {
  return AngularConfig(std::vector<double>(v.data(), v.data() + v.size()));
}

std::string_view to_string(CriticalPointClass c) {
  switch (c) {
    case CriticalPointClass::LocalMin: return "LocalMin";
    case CriticalPointClass::LocalMax: return "LocalMax";
    case CriticalPointClass::Saddle: return "Saddle";
    case CriticalPointClass::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

CriticalPointClass critical_point_class_from_string(std::string_view s) {
  if (s == "LocalMin") return CriticalPointClass::LocalMin;
  if (s == "LocalMax") return CriticalPointClass::LocalMax;
  if (s == "Saddle") return CriticalPointClass::Saddle;
  if (s == "Degenerate") return CriticalPointClass::Degenerate;
  throw Error(ErrorKind::InvalidArgument, "unknown critical point class '" + std::string(s) + "'");
}

double min_chord(const AngularConfig& theta) {
  double best = 2.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      best = std::min(best, 2.0 * std::abs(std::sin(0.5 * (theta[i] - theta[j]))));
    }
  }
  return best;
}

double potential(const AngularConfig& theta, const PotentialOptions& opts) {
  check_collisions(theta, opts);
  double v = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      const double d = theta[i] - theta[j];
      v -= std::cos(d) + 0.5 * std::log(chord_sq(d));
    }
  }
  return v;
}

Vector gradient(const AngularConfig& theta, const PotentialOptions& opts) {
  check_collisions(theta, opts);
  const auto n = static_cast<Eigen::Index>(theta.size());
  Vector g = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      // term for component j uses d = theta_j - theta_i; antisymmetric in (i, j)
      const double d = theta[static_cast<std::size_t>(j)] - theta[static_cast<std::size_t>(i)];
      const double s = std::sin(d);
      const double t = s - s / chord_sq(d);
      g(j) += t;
      g(i) -= t;
    }
  }
  return g;
}

Matrix hessian(const AngularConfig& theta, const PotentialOptions& opts) {
  check_collisions(theta, opts);
  const auto n = static_cast<Eigen::Index>(theta.size());
  Matrix h = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = theta[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(j)];
      const double off = -std::cos(d) - 1.0 / chord_sq(d);
      h(i, j) = off;
      h(j, i) = off;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row += h(i, j);
    }
    h(i, i) = -row;
  }
  return h;
}

MorseIndex morse_counts(const SpectrumReport& spectrum) {
  const double threshold = spectrum.tol_used * std::max(1.0, spectrum.spectral_radius());
  MorseIndex idx;
  for (const auto& z : spectrum.eigenvalues) {
    if (std::abs(z) < threshold) {
      ++idx.zero;
    } else if (z.real() < 0.0) {
      ++idx.negative;
    } else {
      ++idx.positive;
    }
  }
  return idx;
}

CriticalPointClass classify_counts(const MorseIndex& index) {
  if (index.zero >= 2) return CriticalPointClass::Degenerate;
  if (index.zero == 1 && index.negative == 0) return CriticalPointClass::LocalMin;
  if (index.zero == 1 && index.positive == 0) return CriticalPointClass::LocalMax;
  // zero == 0 cannot happen for an exact Hessian (v0 is always a null vector);
  // it would mean a corrupted input, which is not a nondegenerate extremum.
  if (index.zero == 0) return CriticalPointClass::Degenerate;
  return CriticalPointClass::Saddle;
}

Classification classify(const AngularConfig& theta, const PotentialOptions& opts) {
  const Vector g = gradient(theta, opts);
  const double gnorm = g.cwiseAbs().maxCoeff();
  if (!(gnorm < opts.critical_tol)) {
    std::ostringstream msg;
    msg << "gradient sup-norm " << gnorm << " exceeds " << opts.critical_tol;
    throw Error(ErrorKind::NotCritical, msg.str());
  }
  Classification out;
  out.spectrum = eig_symmetric(hessian(theta, opts), opts.zero_tol);
  out.index = morse_counts(out.spectrum);
  out.kind = classify_counts(out.index);
  return out;
}

AngularConfig ngon(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidN, "ngon needs N >= 2");
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / n;
  return AngularConfig(std::move(a));
}

}  // namespace vortex
