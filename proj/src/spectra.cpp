#include "vortex/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Rotate each column so its largest-magnitude entry is real and positive.
void fix_phases(ComplexMatrix& vecs) {
  for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
      const double mag = std::abs(vecs(i, k));
      if (mag > best + 1e-14 * std::max(1.0, best)) {
        best = mag;
        imax = i;
      }
    }
    if (best > 0.0) {
      const Complex phase = std::conj(vecs(imax, k)) / best;
      vecs.col(k) *= phase;
    }
  }
}

SpectrumReport finish(std::vector<Complex> eigs, std::optional<ComplexMatrix> vecs, double tol) {
  std::vector<std::size_t> order(eigs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return complex_less(eigs[a], eigs[b]); });

  SpectrumReport report;
  report.tol_used = tol;
  report.eigenvalues.reserve(eigs.size());
  for (std::size_t k : order) report.eigenvalues.push_back(eigs[k]);
  report.is_real_spectrum = std::all_of(report.eigenvalues.begin(), report.eigenvalues.end(),
                                        [](const Complex& z) { return z.imag() == 0.0; });
  report.zero_count = count_zeros(report.eigenvalues, tol);
  if (vecs) {
    ComplexMatrix sorted(vecs->rows(), vecs->cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
      sorted.col(static_cast<Eigen::Index>(k)) = vecs->col(static_cast<Eigen::Index>(order[k]));
    }
    fix_phases(sorted);
    report.eigenvectors = std::move(sorted);
  }
  return report;
}

}  // namespace

double SpectrumReport::spectral_radius() const {
  double rho = 0.0;
  for (const auto& z : eigenvalues) rho = std::max(rho, std::abs(z));
  return rho;
}

std::vector<double> SpectrumReport::real_parts() const {
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (const auto& z : eigenvalues) out.push_back(z.real());
  return out;
}

int count_zeros(const std::vector<Complex>& eigenvalues, double tol) {
  double rho = 0.0;
  for (const auto& z : eigenvalues) rho = std::max(rho, std::abs(z));
  const double threshold = tol * std::max(1.0, rho);
  return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                        [&](const Complex& z) { return std::abs(z) < threshold; }));
}

SpectrumReport eig_symmetric(const Matrix& s, double tol, bool want_vectors) {
  if (s.rows() != s.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "eig_symmetric needs a square matrix");
  }
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::NotSymmetric, "matrix is not symmetric within 1e-12 relative");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      s, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  std::vector<Complex> eigs;
  eigs.reserve(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) eigs.emplace_back(solver.eigenvalues()(i), 0.0);
  std::optional<ComplexMatrix> vecs;
  if (want_vectors) vecs = solver.eigenvectors().cast<Complex>();
  return finish(std::move(eigs), std::move(vecs), tol);
}

SpectrumReport eig_general(const Matrix& m, double tol, bool want_vectors) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "eig_general needs a square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "eig_general: matrix has non-finite entries");
  }
  Eigen::EigenSolver<Matrix> solver;
  solver.setMaxIterations(std::max<Eigen::Index>(100 * m.rows(), 40));
  solver.compute(m, want_vectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "Hessenberg QR iteration cap reached");
  }
  std::vector<Complex> eigs(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + solver.eigenvalues().size());
  std::optional<ComplexMatrix> vecs;
  if (want_vectors) {
    ComplexMatrix v = solver.eigenvectors();
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      const double nrm = v.col(k).norm();
      if (nrm > 0.0) v.col(k) /= nrm;
    }
    vecs = std::move(v);
  }
  return finish(std::move(eigs), std::move(vecs), tol);
}

double ngon_b(int j, int n) {
  const double two_pi_over_n = 2.0 * std::numbers::pi / n;
  double sum = 0.0;
  for (int k = 1; k < n; ++k) {
    sum += (1.0 - std::cos(two_pi_over_n * j * k)) / (1.0 - std::cos(two_pi_over_n * k));
  }
  return 0.5 * sum;
}

std::vector<double> circulant_eigenvalues(const std::vector<double>& first_row) {
  const std::size_t n = first_row.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      // (j*k) mod n keeps the cosine argument small.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / n;
      acc += first_row[k] * std::cos(phase);
    }
    out[j] = acc;
  }
  return out;
}

std::vector<double> ngon_spectrum_closed_form(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidN, "N-gon spectrum needs N >= 2");
  if (n == 2) {
    // First row of the collinear Hessian: off-diagonal -cos(pi) - 1/4 = 3/4.
    return circulant_eigenvalues({-0.75, 0.75});
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int j = 1; j < n; ++j) {
    out[static_cast<std::size_t>(j)] = (j == 1 || j == n - 1) ? -0.5 : ngon_b(j, n);
  }
  return out;
}

BlockDeterminants block_determinant(const Matrix& a, const Matrix& b, const Matrix& c,
                                    const Matrix& d) {
  const Eigen::Index n = a.rows();
  for (const Matrix* blk : {&a, &b, &c, &d}) {
    if (blk->rows() != n || blk->cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "blocks must all be n x n");
    }
  }
  auto condition = [](const Matrix& x) {
    Eigen::JacobiSVD<Matrix> svd(x);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  };
  if (condition(a) >= 1e12) throw Error(ErrorKind::SingularBlock, "block A is numerically singular");
  if (condition(d) >= 1e12) throw Error(ErrorKind::SingularBlock, "block D is numerically singular");

  Matrix m(2 * n, 2 * n);
  m << a, b, c, d;

  const Eigen::PartialPivLU<Matrix> lu_a(a);
  const Eigen::PartialPivLU<Matrix> lu_d(d);
  BlockDeterminants out;
  out.direct = m.partialPivLu().determinant();
  out.via_a = lu_a.determinant() * Matrix(d - c * lu_a.solve(b)).partialPivLu().determinant();
  out.via_d = lu_d.determinant() * Matrix(a - b * lu_d.solve(c)).partialPivLu().determinant();
  return out;
}

Complex skew_inner(const ComplexVector& v, const ComplexVector& w) {
  if (v.size() != w.size() || v.size() % 2 != 0) {
    throw Error(ErrorKind::DimensionMismatch, "skew_inner needs equal even-length vectors");
  }
  const Eigen::Index n = v.size() / 2;
  Complex acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += -v(i) * w(n + i) + v(n + i) * w(i);
  }
  return acc;
}

}  // namespace vortex
