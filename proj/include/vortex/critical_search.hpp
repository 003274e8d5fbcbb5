#pragma once

#include <cstdint>
#include <vector>

#include "vortex/limit_potential.hpp"

namespace vortex {

// Gap coordinates of an ordered configuration with theta_1 = 0:
// gaps[0] = 0 and gaps[k] = theta_{k+1} - theta_k for k >= 1.
struct WedgeConfig {
  std::vector<double> gaps;
};

WedgeConfig to_wedge(const AngularConfig& ordered);
AngularConfig from_wedge(const WedgeConfig& wedge);
bool in_wedge_interior(const WedgeConfig& wedge);

struct CriticalPoint {
  AngularConfig config;  // canonical form
  CriticalPointClass kind = CriticalPointClass::Degenerate;
  SpectrumReport spectrum;
  MorseIndex morse;
  double residual = 0.0;  // sup-norm of the gradient
  // Convergence threshold actually applied: max(newton_tol, roundoff floor).
  double tolerance = 0.0;
  double value = 0.0;     // V at the point
  bool reflection_symmetric = false;
};

struct SearchOptions {
  double newton_tol = 1e-12;
  int max_iterations = 200;
  int max_halvings = 30;
  double collision_sep = 1e-10;
  double zero_tol = kDefaultZeroTol;
  double dedup_tol = 1e-6;
  // Starts keep every circular gap above this margin.
  double start_margin = 1e-2;
  // Extra starts that first descend V (saddle-free Newton) before the plain
  // Newton refinement; these land on local minima.
  int descent_starts = 0;
  double descent_handoff = 1e-6;
  // 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;

  PotentialOptions potential_options() const;
};

struct FamilyCatalog {
  int n = 0;
  std::vector<CriticalPoint> points;
  // hits[k] counts the starts that converged onto points[k]
  std::vector<int> hits;
  int starts = 0;  // plain Newton starts; descent starts are in options
  int failed_starts = 0;
  std::uint64_t seed = 0;
  SearchOptions options;
};

// The N circular gaps between consecutive sorted angles (wrapped to [0, 2pi)),
// the last one closing the circle.
std::vector<double> circular_gaps(const AngularConfig& theta);

// Representative modulo rotation, relabeling and reflection: theta_1 = 0,
// ascending angles, lexicographically smallest gap sequence.
AngularConfig canonicalize(const AngularConfig& theta, double collision_sep = 1e-10);

// Smallest sup-distance between the circular gap sequences of a and b over
// every cyclic shift and reflection.
double symmetry_distance(const AngularConfig& a, const AngularConfig& b);

// 4 eps max(1, max|theta|) max_i sum_j |H_ij|: the gradient error caused by
// rounding the angles themselves. Newton cannot be asked to beat it.
double gradient_roundoff_floor(const AngularConfig& theta, const Matrix& h);
double effective_tolerance(const AngularConfig& theta, const Matrix& h, double newton_tol);

bool is_reflection_symmetric(const AngularConfig& theta, double tol);

// Builds the classified record for an already converged point.
CriticalPoint make_critical_point(const AngularConfig& theta, const SearchOptions& opts = {});

// Damped Newton on grad V restricted to the complement of (1, ..., 1).
CriticalPoint newton_refine(const AngularConfig& start, const SearchOptions& opts = {});

// Descends V from `start` until |grad V|_inf < opts.descent_handoff or the
// line search stalls. The result is a start for newton_refine.
AngularConfig descend(const AngularConfig& start, const SearchOptions& opts = {});

// A uniformly distributed start in the gap simplex (every gap > margin).
AngularConfig sample_wedge_start(int n, std::uint64_t seed, std::uint64_t index, double margin);

FamilyCatalog multistart_search(int n, int n_starts, std::uint64_t seed,
                                const SearchOptions& opts = {});

MorseIndex morse_index(const CriticalPoint& cp);

}  // namespace vortex
