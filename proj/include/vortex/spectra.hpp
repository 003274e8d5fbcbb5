#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace vortex {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultZeroTol = 1e-9;

// Eigenvalues sorted by (real, imag) ascending. When eigenvectors were
// requested, column k of `eigenvectors` belongs to eigenvalues[k].
struct SpectrumReport {
  std::vector<Complex> eigenvalues;
  int zero_count = 0;
  double tol_used = kDefaultZeroTol;
  bool is_real_spectrum = true;
  std::optional<ComplexMatrix> eigenvectors;

  double spectral_radius() const;
  std::vector<double> real_parts() const;
};

// Number of entries with |lambda| < tol * max(1, spectral radius).
int count_zeros(const std::vector<Complex>& eigenvalues, double tol);

SpectrumReport eig_symmetric(const Matrix& s, double tol = kDefaultZeroTol,
                             bool want_vectors = false);

SpectrumReport eig_general(const Matrix& m, double tol = kDefaultZeroTol,
                           bool want_vectors = false);

/// Eigenvalues of the limit-potential Hessian at the regular N-gon, indexed by
/// the root of unity omega^j they belong to (j = 0..N-1). Uses the closed form
/// 0, -1/2 (j = 1, N-1) and b(j, N) otherwise; N = 2 falls back to the
/// generator polynomial since its single nontrivial root is not -1/2.
std::vector<double> ngon_spectrum_closed_form(int n);

/// b(j, N) = 1/2 sum_{k=1}^{N-1} (1 - cos(2 j k pi / N)) / (1 - cos(2 k pi / N)).
double ngon_b(int j, int n);

// Real parts of the generator polynomial sum_k a_k omega^{jk} for a symmetric
// circulant matrix with the given first row.
std::vector<double> circulant_eigenvalues(const std::vector<double>& first_row);

struct BlockDeterminants {
  double direct = 0.0;       // det of the assembled 2n x 2n matrix
  double via_a = 0.0;        // det(A) det(D - C A^-1 B)
  double via_d = 0.0;        // det(D) det(A - B D^-1 C)
};

BlockDeterminants block_determinant(const Matrix& a, const Matrix& b, const Matrix& c,
                                    const Matrix& d);

// v^T J w with J = [[0, -I], [I, 0]]. Plain transpose, no conjugation.
Complex skew_inner(const ComplexVector& v, const ComplexVector& w);

}  // namespace vortex
