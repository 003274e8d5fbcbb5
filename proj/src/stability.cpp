#include "vortex/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vortex {

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Vector central_difference_column(const PolarState& s, double epsilon, Eigen::Index col, double h) {
  const auto n = static_cast<Eigen::Index>(s.size());
  PolarState plus = s;
  PolarState minus = s;
  auto& p = col < n ? plus.r : plus.theta;
  auto& m = col < n ? minus.r : minus.theta;
  const auto k = static_cast<std::size_t>(col < n ? col : col - n);
  p[k] += h;
  m[k] -= h;
  return (reduced_field(plus, epsilon) - reduced_field(minus, epsilon)) / (2.0 * h);
}

Matrix central_difference_jacobian(const PolarState& s, double epsilon, double rel_step) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix jac(2 * n, 2 * n);
  for (Eigen::Index c = 0; c < 2 * n; ++c) {
    const double x = c < n ? s.r[static_cast<std::size_t>(c)] : s.theta[static_cast<std::size_t>(c - n)];
    jac.col(c) = central_difference_column(s, epsilon, c, rel_step * std::max(1.0, std::abs(x)));
  }
  return jac;
}

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Unit vector along the rotation direction (0, ..., 0, 1, ..., 1).
Vector rotation_direction(Eigen::Index n) {
  Vector e = Vector::Zero(2 * n);
  e.tail(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  return e;
}

// Householder reflector P with P e_1 = e for the rotation direction e. In
// P M P the corner holds e's Rayleigh quotient and the rest of the first
// column vanishes up to |M e|.
struct Deflated {
  Matrix p;
  double corner = 0.0;
  Vector top_row;  // first row of P M P without the corner
  Matrix block;    // trailing (2N-1) x (2N-1) block of P M P
  double residual = 0.0;
};

Deflated deflate(const Matrix& m) {
  const Eigen::Index dim = m.rows();
  if (dim != m.cols() || dim % 2 != 0 || dim == 0) {
    throw Error(ErrorKind::DimensionMismatch, "linearization must be 2N x 2N");
  }
  const Vector e = rotation_direction(dim / 2);
  Vector u = -e;
  u(0) += 1.0;
  Deflated d;
  d.p = Matrix::Identity(dim, dim) - 2.0 * u * u.transpose() / u.squaredNorm();
  const Matrix mp = d.p * m * d.p;
  d.corner = mp(0, 0);
  d.top_row = mp.row(0).tail(dim - 1).transpose();
  d.block = mp.bottomRightCorner(dim - 1, dim - 1);
  d.residual = (m * e).norm();
  return d;
}

}  // namespace

Vector reduced_field(const PolarState& s, double epsilon, double omega) {
  const auto v = weak_velocities(s, epsilon);
  const auto n = static_cast<Eigen::Index>(s.size());
  Vector f(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Complex u = std::polar(1.0, -s.theta[k]) * v[k];
    f(j) = u.real();
    f(n + j) = u.imag() / s.r[k] - omega;
  }
  return f;
}

Matrix reduced_field_jacobian(const PolarState& s, double epsilon) {
  const auto v = weak_velocities(s, epsilon);
  const ComplexMatrix dv = weak_velocity_jacobian(s, epsilon);
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix jac(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Complex rot = std::polar(1.0, -s.theta[k]);
    const Complex u = rot * v[k];
    for (Eigen::Index c = 0; c < 2 * n; ++c) {
      Complex du = rot * dv(j, c);
      if (c == n + j) du -= kI * u;
      jac(j, c) = du.real();
      jac(n + j, c) = du.imag() / s.r[k];
    }
    jac(n + j, j) -= u.imag() / (s.r[k] * s.r[k]);
  }
  return jac;
}

Matrix linearize(const RelativeEquilibrium& eq, const LinearizationOptions& opts,
                 LinearizationCheck* check) {
  const double residual = rotating_frame_residual(eq.state(), eq.epsilon, eq.omega).cwiseAbs().maxCoeff();
  if (!(residual < opts.max_residual)) {
    std::ostringstream msg;
    msg << "equilibrium residual " << residual << " is not below " << opts.max_residual;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  const PolarState s = eq.state();
  const Matrix m = reduced_field_jacobian(s, eq.epsilon);
  const Matrix fd_h = central_difference_jacobian(s, eq.epsilon, opts.fd_step);
  const Matrix fd_half = central_difference_jacobian(s, eq.epsilon, 0.5 * opts.fd_step);
  const double scale = std::max(1.0, max_abs(m));
  LinearizationCheck result;
  result.fd_h_vs_half = max_abs(fd_h - fd_half) / scale;
  result.analytic_vs_fd = max_abs(m - fd_half) / scale;
  if (check) *check = result;
  if (!(result.fd_h_vs_half < opts.richardson_tol) || !(result.analytic_vs_fd < opts.richardson_tol)) {
    std::ostringstream msg;
    msg << "difference quotients disagree: |FD(h) - FD(h/2)| = " << result.fd_h_vs_half
        << ", |analytic - FD(h/2)| = " << result.analytic_vs_fd;
    throw Error(ErrorKind::JacobianUnstable, msg.str());
  }
  return m;
}

Matrix rotation_block_a(const AngularConfig& phi) {
  const auto n = static_cast<Eigen::Index>(phi.size());
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = phi[static_cast<std::size_t>(j)] - phi[static_cast<std::size_t>(i)];
      a(i, j) = std::sin(d);
      a(i, i) -= std::sin(d);
    }
  }
  return a;
}

Matrix asymptotic_linearization(const AngularConfig& phi, double epsilon) {
  const auto n = static_cast<Eigen::Index>(phi.size());
  const Matrix a = rotation_block_a(phi);
  Matrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = -epsilon * a;
  m.topRightCorner(n, n) = epsilon * hessian(phi);
  m.bottomLeftCorner(n, n) = -2.0 * Matrix::Identity(n, n);
  m.bottomRightCorner(n, n) = epsilon * a;
  return m;
}

std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::LinearlyStable: return "LinearlyStable";
    case StabilityClass::LinearlyUnstable: return "LinearlyUnstable";
    case StabilityClass::Marginal: return "Marginal";
  }
  return "Marginal";
}

std::vector<Complex> linearization_eigenvalues(const Matrix& m, double* rotation_residual) {
  const Deflated d = deflate(m);
  if (rotation_residual) *rotation_residual = d.residual;
  std::vector<Complex> eigs;
  eigs.reserve(static_cast<std::size_t>(m.rows()));
  eigs.emplace_back(d.corner, 0.0);
  const SpectrumReport rest = eig_general(d.block);
  eigs.insert(eigs.end(), rest.eigenvalues.begin(), rest.eigenvalues.end());
  std::stable_sort(eigs.begin(), eigs.end(), complex_less);
  return eigs;
}

StabilityVerdict stability_verdict(const RelativeEquilibrium& eq, const StabilityOptions& opts) {
  const Matrix m = linearize(eq, opts.linearization);
  StabilityVerdict out;
  out.zero_threshold = opts.zero_tol * std::sqrt(std::abs(eq.epsilon));
  out.spectrum.eigenvalues = linearization_eigenvalues(m, &out.rotation_residual);
  out.spectrum.tol_used = out.zero_threshold;
  out.spectrum.is_real_spectrum = std::all_of(out.spectrum.eigenvalues.begin(), out.spectrum.eigenvalues.end(),
                                              [](const Complex& z) { return z.imag() == 0.0; });

  bool all_imaginary = true;
  out.max_real_part = -std::numeric_limits<double>::infinity();
  for (const auto& z : out.spectrum.eigenvalues) {
    out.max_real_part = std::max(out.max_real_part, z.real());
    if (std::abs(z) < out.zero_threshold) {
      ++out.n_zero;
      continue;
    }
    if (z.real() > out.zero_threshold) ++out.instability_count;
    if (!(std::abs(z.real()) < opts.imag_rel_tol * std::abs(z))) all_imaginary = false;
  }
  out.spectrum.zero_count = out.n_zero;

  if (out.n_zero > 2) {
    out.classification = StabilityClass::Marginal;
  } else if (!all_imaginary) {
    out.classification = StabilityClass::LinearlyUnstable;
  } else if (out.n_zero == 2) {
    out.classification = StabilityClass::LinearlyStable;
  } else {
    // fewer zeros than the two symmetries force: the solve is not trustworthy
    out.classification = StabilityClass::Marginal;
  }
  return out;
}

std::vector<Complex> asymptotic_eigenvalues(const CriticalPoint& cp, double epsilon) {
  const MorseIndex idx = morse_counts(cp.spectrum);
  if (idx.zero != 1) {
    throw Error(ErrorKind::DegenerateSeed, "seed Hessian must have exactly one zero eigenvalue");
  }
  const double threshold = cp.spectrum.tol_used * std::max(1.0, cp.spectrum.spectral_radius());
  std::vector<Complex> out;
  for (const auto& z : cp.spectrum.eigenvalues) {
    const double zeta = z.real();
    if (std::abs(zeta) < threshold) continue;
    const double g = 2.0 * zeta * epsilon;
    const Complex lambda = g > 0.0 ? Complex{0.0, std::sqrt(g)} : Complex{std::sqrt(-g), 0.0};
    out.push_back(lambda);
    out.push_back(-lambda);
  }
  std::stable_sort(out.begin(), out.end(), complex_less);
  return out;
}

PairingReport skew_pairing_check(const RelativeEquilibrium& eq, const StabilityOptions& opts) {
  const Matrix m = linearize(eq, opts.linearization);
  // Eigenvectors of the deflated block lifted back through P: an eigenvector
  // y of the block for lambda extends to (beta, y) of P M P with
  // beta = top_row . y / (lambda - corner).
  const Deflated d = deflate(m);
  const SpectrumReport block_spec = eig_general(d.block, kDefaultZeroTol, true);
  const double root = std::sqrt(std::abs(eq.epsilon));
  const double threshold = opts.zero_tol * root;
  const Eigen::Index dim = m.rows();
  PairingReport rep;
  rep.nondegenerate = true;
  for (std::size_t k = 0; k < block_spec.eigenvalues.size(); ++k) {
    const Complex lambda = block_spec.eigenvalues[k];
    if (std::abs(lambda) < threshold) continue;
    const ComplexVector y = block_spec.eigenvectors->col(static_cast<Eigen::Index>(k));
    ComplexVector x(dim);
    x(0) = d.top_row.cast<Complex>().dot(y) / (lambda - d.corner);
    x.tail(dim - 1) = y;
    ComplexVector v = d.p.cast<Complex>() * x;
    v.normalize();
    const Complex omega = skew_inner(v, v.conjugate());
    rep.eigenvalues.push_back(lambda);
    rep.pairing.push_back(omega);
    rep.scaled_pairing.push_back(std::abs(omega) / root);
    if (!(std::abs(omega) > 0.1 * root)) rep.nondegenerate = false;
  }
  if (rep.eigenvalues.empty()) rep.nondegenerate = false;
  return rep;
}

RingIntervalResult ring_interval_check(int n, double epsilon, const StabilityOptions& opts) {
  if (n < 2) throw Error(ErrorKind::InvalidN, "ring_interval_check needs N >= 2");
  if (epsilon == 0.0 || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidEpsilon, "epsilon must be finite and nonzero");
  }
  const double nd = n;
  RingIntervalResult out;
  out.p = 1.0 / epsilon;
  out.lower = (nd * nd - 8.0 * nd + (n % 2 == 0 ? 8.0 : 7.0)) / 16.0;
  out.upper = (nd - 1.0) * (nd - 1.0) / 4.0;
  out.stable_interval = out.lower < out.p && out.p < out.upper;
  out.verdict = stability_verdict(ngon_equilibrium(n, epsilon), opts).classification;
  out.consistent = out.stable_interval == (out.verdict == StabilityClass::LinearlyStable);
  return out;
}

TruncationReport truncation_crosscheck(const RelativeEquilibrium& eq) {
  const Matrix m = linearize(eq);
  const Matrix asym = asymptotic_linearization(eq.source.config, eq.epsilon);
  const auto n = static_cast<Eigen::Index>(eq.r.size());
  const Matrix diff = m - asym;
  TruncationReport rep;
  rep.epsilon = eq.epsilon;
  rep.upper_left = max_abs(diff.topLeftCorner(n, n));
  rep.upper_right = max_abs(diff.topRightCorner(n, n));
  rep.lower_left = max_abs(diff.bottomLeftCorner(n, n));
  rep.lower_right = max_abs(diff.bottomRightCorner(n, n));
  rep.max_abs_a = max_abs(rotation_block_a(eq.source.config));
  return rep;
}

TruncationScaling truncation_scaling(const CriticalPoint& cp, double epsilon,
                                     const ContinuationOptions& opts) {
  TruncationScaling out;
  out.coarse = truncation_crosscheck(continue_equilibrium(cp, epsilon, opts));
  out.fine = truncation_crosscheck(continue_equilibrium(cp, epsilon / 10.0, opts));
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : std::numeric_limits<double>::infinity(); };
  out.upper_left_ratio = ratio(out.coarse.upper_left, out.fine.upper_left);
  out.upper_right_ratio = ratio(out.coarse.upper_right, out.fine.upper_right);
  out.lower_left_ratio = ratio(out.coarse.lower_left, out.fine.lower_left);
  out.lower_right_ratio = ratio(out.coarse.lower_right, out.fine.lower_right);
  return out;
}

}  // namespace vortex
