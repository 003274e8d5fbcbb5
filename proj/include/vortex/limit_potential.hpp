#pragma once

// The limit potential on the weak vortices' angular positions,
//
//   V(theta) = -sum_{i<j} [ cos(theta_i - theta_j) + 1/2 log(2 - 2 cos(theta_i - theta_j)) ],
//
// with its exact gradient and Hessian. Every quantity depends only on angle
// differences, so no wrapping into [0, 2pi) happens here.

#include <cstddef>
#include <string_view>
#include <vector>

#include "vortex/spectra.hpp"

namespace vortex {

struct AngularConfig {
  std::vector<double> angles;

  AngularConfig() = default;
  explicit AngularConfig(std::vector<double> a) : angles(std::move(a)) {}

  std::size_t size() const { return angles.size(); }
  double operator[](std::size_t i) const { return angles[i]; }
  double& operator[](std::size_t i) { return angles[i]; }

  Vector as_vector() const;
  static AngularConfig from_vector(const Vector& v);
};

enum class CriticalPointClass { LocalMin, LocalMax, Saddle, Degenerate };

std::string_view to_string(CriticalPointClass c);
CriticalPointClass critical_point_class_from_string(std::string_view s);

struct MorseIndex {
  int negative = 0;
  int zero = 0;
  int positive = 0;

  friend bool operator==(const MorseIndex&, const MorseIndex&) = default;
};

struct PotentialOptions {
  // Minimum chord |e^{i a} - e^{i b}| between two weak vortices.
  double collision_sep = 1e-10;
  // Zero-eigenvalue tolerance, relative to max(1, spectral radius).
  double zero_tol = kDefaultZeroTol;
  // classify() refuses points whose gradient sup-norm exceeds this.
  double critical_tol = 1e-8;
};

// Smallest chord between any two angles; 2 for N = 1.
double min_chord(const AngularConfig& theta);

double potential(const AngularConfig& theta, const PotentialOptions& opts = {});
Vector gradient(const AngularConfig& theta, const PotentialOptions& opts = {});
Matrix hessian(const AngularConfig& theta, const PotentialOptions& opts = {});

// Sign counts with the symmetric zero tolerance used by eig_symmetric.
MorseIndex morse_counts(const SpectrumReport& spectrum);

struct Classification {
  CriticalPointClass kind = CriticalPointClass::Degenerate;
  SpectrumReport spectrum;
  MorseIndex index;
};

CriticalPointClass classify_counts(const MorseIndex& index);

Classification classify(const AngularConfig& theta, const PotentialOptions& opts = {});

// Equally spaced angles 2 pi (j - 1) / N.
AngularConfig ngon(int n);

}  // namespace vortex
