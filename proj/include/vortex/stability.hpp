#pragma once

// Linear stability of continued relative equilibria in the reduced polar
// system (strong vortex eliminated through the centre of vorticity):
//
//   dr_j/dt     = Re(e^{-i theta_j} v_j)
//   dtheta_j/dt = Im(e^{-i theta_j} v_j) / r_j - omega
//
// State ordering is (r_1..r_N, theta_1..theta_N). In these coordinates the
// linearization at small epsilon has the block form
//
//   [ -eps A + O(eps^2)   eps V_thth + O(eps^2) ]
//   [ -2 I + O(eps)       eps A + O(eps^2)      ]
//
// with a_ij = sin(phi_j - phi_i) and a_ii = sum_{j != i} sin(phi_i - phi_j).

#include <string_view>
#include <vector>

#include "vortex/continuation.hpp"

namespace vortex {

Vector reduced_field(const PolarState& s, double epsilon, double omega = 1.0);
Matrix reduced_field_jacobian(const PolarState& s, double epsilon);

struct LinearizationOptions {
  double fd_step = 1e-7;          // relative to max(1, |state|)
  double richardson_tol = 1e-5;   // h vs h/2 agreement, relative to max|M|
  double max_residual = 1e-10;    // equilibria with a larger residual are rejected
};

struct LinearizationCheck {
  double fd_h_vs_half = 0.0;      // max|FD(h) - FD(h/2)| / max(1, max|M|)
  double analytic_vs_fd = 0.0;    // max|M - FD(h/2)| / max(1, max|M|)
};

// Jacobian of the reduced field at eq (analytic), after checking it against
// central differences at steps h and h/2. Throws JacobianUnstable when the two
// difference quotients or the analytic matrix disagree beyond richardson_tol.
Matrix linearize(const RelativeEquilibrium& eq, const LinearizationOptions& opts = {},
                 LinearizationCheck* check = nullptr);

// Leading-order block form assembled from the seed: [[-eps A, eps H], [-2 I, eps A]].
Matrix asymptotic_linearization(const AngularConfig& phi, double epsilon);
Matrix rotation_block_a(const AngularConfig& phi);

enum class StabilityClass { LinearlyStable, LinearlyUnstable, Marginal };

std::string_view to_string(StabilityClass c);

struct StabilityOptions {
  // Zero threshold is zero_tol * sqrt(|epsilon|): nonzero eigenvalues shrink
  // like sqrt(epsilon).
  double zero_tol = 1e-6;
  // lambda counts as purely imaginary when |Re lambda| < imag_rel_tol |lambda|.
  double imag_rel_tol = 1e-4;
  LinearizationOptions linearization;
};

struct StabilityVerdict {
  StabilityClass classification = StabilityClass::Marginal;
  SpectrumReport spectrum;
  int n_zero = 0;
  double max_real_part = 0.0;
  int instability_count = 0;     // eigenvalues with Re lambda above tolerance
  double zero_threshold = 0.0;
  double rotation_residual = 0.0;  // |M (0, v0)| / |(0, v0)|
};

// Eigenvalues of M with the exact rotation null vector (0, v0) deflated by an
// orthogonal similarity before the QR iteration. The deflated eigenvalue is
// the Rayleigh quotient on (0, v0). Deflation removes the 2x2 Jordan block at
// zero, whose eigenvalues would otherwise split like sqrt(roundoff).
std::vector<Complex> linearization_eigenvalues(const Matrix& m, double* rotation_residual = nullptr);

StabilityVerdict stability_verdict(const RelativeEquilibrium& eq, const StabilityOptions& opts = {});

// +-i sqrt(2 zeta eps) for zeta eps > 0 and +-sqrt(-2 zeta eps) otherwise, for
// every nonzero Hessian eigenvalue zeta of the seed; 2(N - 1) values, sorted.
std::vector<Complex> asymptotic_eigenvalues(const CriticalPoint& cp, double epsilon);

struct PairingReport {
  std::vector<Complex> eigenvalues;    // nonzero eigenvalues that were checked
  std::vector<Complex> pairing;        // Omega(v, conj v) for unit eigenvectors
  std::vector<double> scaled_pairing;  // |Omega(v, conj v)| / sqrt(|epsilon|)
  bool nondegenerate = false;          // every |Omega| > 0.1 sqrt(|epsilon|)
};

PairingReport skew_pairing_check(const RelativeEquilibrium& eq, const StabilityOptions& opts = {});

struct RingIntervalResult {
  double p = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool stable_interval = false;
  StabilityClass verdict = StabilityClass::Marginal;  // our verdict for the exact N-gon
  bool consistent = false;  // stable_interval agrees with verdict == LinearlyStable
};

// Interval test for the ring of N vortices of strength epsilon around a
// central unit vortex, p = 1 / epsilon:
//   (N^2 - 8N + 8) / 16 < p < (N - 1)^2 / 4   (N even)
//   (N^2 - 8N + 7) / 16 < p < (N - 1)^2 / 4   (N odd)
RingIntervalResult ring_interval_check(int n, double epsilon, const StabilityOptions& opts = {});

struct TruncationReport {
  double epsilon = 0.0;
  // max-abs differences between linearize(eq) and the asymptotic block form
  double upper_left = 0.0;
  double upper_right = 0.0;
  double lower_left = 0.0;
  double lower_right = 0.0;
  double max_abs_a = 0.0;  // max|A| at the seed (A is antisymmetric at the N-gon)
};

TruncationReport truncation_crosscheck(const RelativeEquilibrium& eq);

struct TruncationScaling {
  TruncationReport coarse;  // at epsilon
  TruncationReport fine;    // at epsilon / 10
  // coarse / fine error ratios: ~100 for O(eps^2) blocks, ~10 for O(eps)
  double upper_left_ratio = 0.0;
  double upper_right_ratio = 0.0;
  double lower_left_ratio = 0.0;
  double lower_right_ratio = 0.0;
};

TruncationScaling truncation_scaling(const CriticalPoint& cp, double epsilon,
                                     const ContinuationOptions& opts = {});

}  // namespace vortex
