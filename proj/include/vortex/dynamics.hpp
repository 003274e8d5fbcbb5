#pragma once

// Direct integration of the full point-vortex system
//   dq_j/dt = sum_{i != j} Gamma_i (q_j - q_i)^perp / |q_j - q_i|^2,
// with (x, y)^perp = (-y, x). Points are stored as complex numbers.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vortex/continuation.hpp"
#include "vortex/errors.hpp"

namespace vortex {

struct PlanarConfiguration {
  std::vector<Complex> positions;
  std::vector<double> circulations;
  Complex vorticity_centre{0.0, 0.0};  // sum Gamma_i q_i at construction

  // Throws DimensionMismatch on size mismatch, VortexCollision when two points
  // are closer than collision_sep.
  static PlanarConfiguration make(std::vector<Complex> positions, std::vector<double> circulations,
                                  double collision_sep = 1e-10);

  std::size_t size() const { return positions.size(); }
};

// Strong vortex (Gamma = 1) first, then the N weak ones (Gamma = epsilon).
PlanarConfiguration from_equilibrium(const RelativeEquilibrium& eq);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<Complex>> positions;
  std::vector<double> circulations;
  double step = 0.0;
  std::string integrator = "rk4";

  PlanarConfiguration at(std::size_t k) const;
};

// Thrown when the integrator brings two vortices within 10x the collision
// guard; the samples computed so far travel with the exception.
class CollisionAbortError : public Error {
 public:
  CollisionAbortError(const std::string& what, Trajectory partial)
      : Error(ErrorKind::CollisionAbort, what), partial_(std::move(partial)) {}
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

std::vector<Complex> vortex_field(const PlanarConfiguration& c, double collision_sep = 1e-10);
double hamiltonian(const PlanarConfiguration& c, double collision_sep = 1e-10);
double angular_impulse(const PlanarConfiguration& c);  // sum Gamma_i |q_i|^2
Complex vorticity_centre(const PlanarConfiguration& c);

struct IntegrationOptions {
  double collision_sep = 1e-10;
  double abort_factor = 10.0;
};

// Classical RK4. The step is shrunk to T / ceil(T / h) so the run ends at T
// exactly; the step actually used is stored in the trajectory.
Trajectory integrate_rk4(const PlanarConfiguration& c, double h, double t_end,
                         const IntegrationOptions& opts = {});

double rigidity_error(const Trajectory& t);

// max over samples and vortices of |q_j(t) - e^{i omega t} q_j(0)|: the global
// error against the exact solution when t starts at a relative equilibrium.
// Distances are preserved by RK4's leading (phase) error on a rotation, so
// rigidity_error converges one order faster than this quantity.
double rotation_error(const Trajectory& t, double omega = 1.0);

struct ConservationReport {
  double hamiltonian_drift = 0.0;  // max |H(t) - H(0)| / |H(0)|
  double impulse_drift = 0.0;      // max |I(t) - I(0)| / |I(0)|
  double centre_drift = 0.0;       // max |C(t) - C(0)| / max(1, |C(0)|)
};

// Drifts are relative; a first integral that is exactly 0 at t = 0 reports
// its absolute drift instead.
ConservationReport conservation(const Trajectory& t);

struct GrowthOptions {
  double amplitude = 1e-6;
  double t_end = 250.0;
  double step = 0.0245436926061702597;  // 2 pi / 256
  std::uint64_t seed = 1;
  double window_low_factor = 10.0;  // fit where deviation in [factor * amplitude, window_high]
  double window_high = 1e-2;
  std::size_t min_window_samples = 20;
};

struct GrowthReport {
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;  // max Re lambda of the linearization
  bool windowed = false;        // false: fit used every sample
  std::size_t samples_used = 0;
  double initial_deviation = 0.0;
  double final_deviation = 0.0;
  std::vector<double> times;
  std::vector<double> deviations;  // max_{i<j} | |q_i - q_j|(t) - |q_i - q_j|_eq |
};

// eq's configuration with the weak vortices displaced by a seeded Gaussian
// vector of norm `amplitude`; the strong vortex is moved to keep the vorticity
// centre at 0.
PlanarConfiguration perturbed_configuration(const RelativeEquilibrium& eq, double amplitude,
                                            std::uint64_t seed);

// Deviation series of traj against the pairwise distances of `reference` and
// the fitted exponential rate; predicted_rate is left at 0.
GrowthReport fit_growth(const Trajectory& traj, const PlanarConfiguration& reference,
                        const GrowthOptions& opts);

// Perturbs the weak vortices of eq by a seeded random displacement of norm
// `amplitude` (strong vortex reset to keep the vorticity centre at 0),
// integrates, and fits log(deviation) against time. The exact solution rotates
// rigidly, so deviation is measured on pairwise distances.
GrowthReport perturbation_growth(const RelativeEquilibrium& eq, const GrowthOptions& opts = {});

// Header t,x0,y0,...,xN,yN; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);

}  // namespace vortex
