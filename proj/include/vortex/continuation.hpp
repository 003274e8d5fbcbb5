#pragma once

// Continuation of nondegenerate critical points of the limit potential to
// relative equilibria of the full problem with one unit vortex and N vortices
// of circulation epsilon, rotating with rate omega = 1.
//
// Weak vortex j sits at z_j = r_j e^{i theta_j}; the strong vortex is placed at
// the centre of vorticity position z_0 = -epsilon (z_1 + ... + z_N). The
// velocity field is dz_j/dt = i sum_{k != j} Gamma_k / conj(z_j - z_k).

#include <optional>
#include <vector>

#include "vortex/critical_search.hpp"
#include "vortex/errors.hpp"

namespace vortex {

struct PolarState {
  std::vector<double> r;
  std::vector<double> theta;

  std::size_t size() const { return r.size(); }
};

struct RelativeEquilibrium {
  std::vector<double> r;
  std::vector<double> theta;
  double epsilon = 0.0;
  double omega = 1.0;
  double residual = 0.0;  // sup-norm of rotating_frame_residual
  CriticalPoint source;   // seed of the continuation; theta is phase-locked to it

  PolarState state() const { return {r, theta}; }
  std::vector<Complex> weak_positions() const;
  Complex strong_position() const;
};

std::vector<Complex> weak_positions(const PolarState& s);
Complex strong_position(const std::vector<Complex>& weak, double epsilon);

// Velocities of the N weak vortices with z_0 eliminated.
std::vector<Complex> weak_velocities(const PolarState& s, double epsilon,
                                     double collision_sep = 1e-10);

// d v_j / d p for p = (r_1..r_N, theta_1..theta_N); N x 2N complex.
ComplexMatrix weak_velocity_jacobian(const PolarState& s, double epsilon,
                                     double collision_sep = 1e-10);

// i omega z_j - v_j for j = 1..N, returned as [Re_1..Re_N, Im_1..Im_N].
Vector rotating_frame_residual(const PolarState& s, double epsilon, double omega = 1.0,
                               double collision_sep = 1e-10);
Matrix rotating_frame_residual_jacobian(const PolarState& s, double epsilon, double omega = 1.0,
                                        double collision_sep = 1e-10);

struct ContinuationOptions {
  double releq_tol = 1e-12;
  int max_iterations = 50;
  int max_halvings = 30;
  double epsilon_ceiling = 0.05;
  double collision_sep = 1e-10;
  // gap tolerance used to recognise an N-gon seed
  double ngon_tol = 1e-9;
  // Angles of the result may move at most this far (rad) from the seed;
  // anything larger means Newton landed on another family.
  double max_angle_drift = 0.5;
};

bool is_ngon(const AngularConfig& theta, double tol = 1e-9);

// Largest |epsilon| accepted for this seed: the option's ceiling, tightened
// to min(ceiling, 1/N^2) for the N-gon.
double epsilon_ceiling_for(const CriticalPoint& cp, const ContinuationOptions& opts);

// Exact N-gon relative equilibrium: radius sqrt(1 + epsilon (N - 1) / 2).
// Valid for epsilon > -2 / (N - 1).
RelativeEquilibrium ngon_equilibrium(int n, double epsilon);

RelativeEquilibrium continue_equilibrium(const CriticalPoint& cp, double epsilon,
                                         const ContinuationOptions& opts = {},
                                         const std::optional<PolarState>& warm_start = {});

struct SweepResult {
  std::vector<RelativeEquilibrium> equilibria;
  std::optional<Error> failure;  // first failure; equilibria holds what came before it
};

// eps_list must be nonzero and sorted by |epsilon| ascending. Each solve is
// warm-started from the previous solution of the same sign.
SweepResult sweep_epsilon(const CriticalPoint& cp, const std::vector<double>& eps_list,
                          const ContinuationOptions& opts = {});

struct ScalingReport {
  std::vector<double> epsilon;
  std::vector<double> strong_ratio;  // |q_0| / |epsilon|
  std::vector<double> radius_ratio;  // max_j ||q_j|^2 - 1| / |epsilon|
  double strong_spread = 0.0;        // max / min of strong_ratio (1 if all ~ 0)
  double radius_spread = 0.0;
  bool bounded = false;              // both spreads < 10
};

// |q_0| = O(epsilon) and |q_j|^2 - 1 = O(epsilon) along a sweep: the ratios must
// stay within a factor 10 across at least three magnitudes of one sign.
ScalingReport verify_scaling_bounds(const std::vector<RelativeEquilibrium>& family);

}  // namespace vortex
