#include <doctest.h>

#include "oracles.hpp"
#include "vortex/stability.hpp"

using namespace vortex;

namespace {

CriticalPoint family(int n, CriticalPointClass kind) {
  const auto cat = multistart_search(n, 300, 1);
  for (const auto& cp : cat.points) {
    if (cp.kind == kind) return cp;
  }
  FAIL("family not found");
  return {};
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("reduced field Jacobian matches finite differences") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
    PolarState s{std::vector<double>(n), oracle::random_angles(n, rng, 0.2)};
    std::uniform_real_distribution<double> u(0.9, 1.1);
    for (auto& r : s.r) r = u(rng);
    const double eps = trial % 2 ? 5e-3 : -2e-3;
    const Matrix jac = reduced_field_jacobian(s, eps);
    auto field = [&](const std::vector<double>& x) {
      PolarState p{{x.begin(), x.begin() + static_cast<long>(n)}, {x.begin() + static_cast<long>(n), x.end()}};
      const Vector v = reduced_field(p, eps);
      return std::vector<double>(v.data(), v.data() + v.size());
    };
    std::vector<double> x = s.r;
    x.insert(x.end(), s.theta.begin(), s.theta.end());
    const auto fd = oracle::fd_jacobian(field, x, 1e-6);
    double err = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      for (std::size_t k = 0; k < 2 * n; ++k) {
        err = std::max(err, std::abs(jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) - fd[i][k]));
      }
    }
    CHECK(err < 1e-6 * std::max(1.0, max_abs(jac)));
  }
}

TEST_CASE("linearization block structure") {
  const auto tri = continue_equilibrium(family(2, CriticalPointClass::LocalMin), 1e-4);
  LinearizationCheck check;
  const Matrix m = linearize(tri, {}, &check);
  CHECK(check.analytic_vs_fd < 1e-6);
  CHECK(max_abs(m.bottomLeftCorner(2, 2) + 2.0 * Matrix::Identity(2, 2)) < 1e-2);

  const auto sq = continue_equilibrium(make_critical_point(ngon(4)), 1e-3);
  const Matrix ms = linearize(sq);
  const Matrix h = hessian(ngon(4));
  CHECK(max_abs(ms.topRightCorner(4, 4) - 1e-3 * h) < 1e-4);
  // at the N-gon the row sums vanish, so A is antisymmetric with a zero diagonal
  const Matrix a7 = rotation_block_a(ngon(7));
  CHECK(max_abs(a7 + a7.transpose()) < 1e-14);
  CHECK(a7.diagonal().cwiseAbs().maxCoeff() < 1e-14);

  RelativeEquilibrium off = sq;
  off.r[0] += 1e-3;
  CHECK_THROWS_AS(linearize(off), Error);
}

TEST_CASE("verdicts for the small families") {
  const auto tri = family(2, CriticalPointClass::LocalMin);
  CHECK(stability_verdict(continue_equilibrium(tri, 1e-3)).classification == StabilityClass::LinearlyStable);
  CHECK(stability_verdict(continue_equilibrium(tri, -1e-3)).classification == StabilityClass::LinearlyUnstable);
  for (double eps : {1e-3, -1e-3}) {
    const auto v = stability_verdict(continue_equilibrium(make_critical_point(ngon(4)), eps));
    CHECK(v.classification == StabilityClass::LinearlyUnstable);
  }
}

TEST_CASE("spectral invariants of continued equilibria") {
  for (int n : {2, 3, 4}) {
    for (const auto& cp : multistart_search(n, 300, 1).points) {
      for (double eps : {1e-3, -1e-3, 1e-4}) {
        const auto v = stability_verdict(continue_equilibrium(cp, eps));
        CHECK(v.n_zero == 2);
        CHECK(v.rotation_residual < 1e-12);
        const auto& ev = v.spectrum.eigenvalues;
        double scale = 0.0;
        for (const auto& z : ev) scale = std::max(scale, std::abs(z));
        for (const auto& z : ev) {
          double best = 1e300;
          for (const auto& w : ev) best = std::min(best, std::abs(w + z));
          CHECK(best < 1e-8 * scale);
        }
      }
    }
  }
}

TEST_CASE("asymptotic eigenvalues") {
  const auto tri = family(2, CriticalPointClass::LocalMin);
  const auto pred = asymptotic_eigenvalues(tri, 1e-4);
  REQUIRE(pred.size() == 2);
  for (const auto& z : pred) {
    CHECK(std::abs(z.real()) < 1e-15);
    CHECK(std::abs(z.imag()) == doctest::Approx(std::sqrt(6e-4)).epsilon(1e-12));
  }
  for (const auto& z : asymptotic_eigenvalues(tri, -1e-4)) CHECK(std::abs(z.imag()) < 1e-15);

  CriticalPoint degenerate = tri;
  degenerate.spectrum.eigenvalues = {0.0, 0.0};
  CHECK_THROWS_AS(asymptotic_eigenvalues(degenerate, 1e-4), Error);

  for (const auto& cp : multistart_search(4, 300, 1).points) {
    const double eps = 1e-5;
    const auto v = stability_verdict(continue_equilibrium(cp, eps));
    auto want = asymptotic_eigenvalues(cp, eps);
    std::vector<double> got_abs;
    std::vector<double> want_abs;
    for (const auto& z : v.spectrum.eigenvalues) {
      if (std::abs(z) > v.zero_threshold) got_abs.push_back(std::abs(z));
    }
    for (const auto& z : want) want_abs.push_back(std::abs(z));
    REQUIRE(got_abs.size() == want_abs.size());
    std::sort(got_abs.begin(), got_abs.end());
    std::sort(want_abs.begin(), want_abs.end());
    for (std::size_t k = 0; k < got_abs.size(); ++k) CHECK(std::abs(got_abs[k] / want_abs[k] - 1.0) < 0.05);
  }
}

TEST_CASE("skew pairing is nondegenerate on stable families") {
  const auto tri = continue_equilibrium(family(2, CriticalPointClass::LocalMin), 1e-4);
  const auto p = skew_pairing_check(tri);
  CHECK(p.nondegenerate);
  CHECK(p.eigenvalues.size() == 2);
  for (double s : p.scaled_pairing) CHECK(s > 0.1);

  const auto mn = continue_equilibrium(family(3, CriticalPointClass::LocalMin), 1e-4);
  CHECK(skew_pairing_check(mn).nondegenerate);

  // unstable saddle: real eigenvalues carry real eigenvectors, so the pairing vanishes
  const auto sad = continue_equilibrium(family(3, CriticalPointClass::Saddle), 1e-4);
  const auto ps = skew_pairing_check(sad);
  bool saw_real = false;
  for (std::size_t k = 0; k < ps.eigenvalues.size(); ++k) {
    if (std::abs(ps.eigenvalues[k].imag()) < 1e-12) {
      saw_real = true;
      CHECK(std::abs(ps.pairing[k]) < 1e-12);
    }
  }
  CHECK(saw_real);
}

TEST_CASE("ring stability interval") {
  const auto ten = ring_interval_check(10, 1e-3);
  CHECK_FALSE(ten.stable_interval);
  CHECK(ten.verdict == StabilityClass::LinearlyUnstable);
  CHECK(ten.consistent);

  const auto four = ring_interval_check(4, 0.2);
  CHECK(four.lower == doctest::Approx(-0.5));
  CHECK(four.upper == doctest::Approx(2.25));
  CHECK_FALSE(four.stable_interval);
  CHECK(four.verdict == StabilityClass::LinearlyUnstable);

  for (int n : {8, 10, 12}) CHECK_FALSE(ring_interval_check(n, -1e-3).stable_interval);
  CHECK_THROWS_AS(ring_interval_check(5, 0.0), Error);
}

TEST_CASE("instability count of the 10-gon") {
  const CriticalPoint cp = make_critical_point(ngon(10));
  CHECK(stability_verdict(continue_equilibrium(cp, 1e-3)).instability_count == 2);
  CHECK(stability_verdict(continue_equilibrium(cp, -1e-3)).instability_count == 7);
}

TEST_CASE("truncated block form") {
  const auto sc = truncation_scaling(family(3, CriticalPointClass::LocalMin), 1e-3);
  CHECK(sc.upper_left_ratio == doctest::Approx(100.0).epsilon(0.2));
  CHECK(sc.upper_right_ratio == doctest::Approx(100.0).epsilon(0.2));
  CHECK(sc.lower_left_ratio == doctest::Approx(10.0).epsilon(0.2));
  CHECK(sc.lower_right_ratio == doctest::Approx(100.0).epsilon(0.2));

  const auto ring = truncation_crosscheck(continue_equilibrium(make_critical_point(ngon(6)), 1e-3));
  CHECK(ring.upper_left < 10.0 * 1e-6);
  CHECK(ring.upper_right < 10.0 * 1e-6);
  CHECK(ring.lower_right < 10.0 * 1e-6);
  CHECK(ring.lower_left < 10.0 * 1e-3);

  // upper-right block over epsilon approaches the Hessian linearly
  const auto cp = family(4, CriticalPointClass::Saddle);
  const Matrix h = hessian(cp.config);
  std::vector<double> err;
  for (double eps : {1e-3, 1e-4}) {
    const Matrix m = linearize(continue_equilibrium(cp, eps));
    err.push_back(max_abs(m.topRightCorner(4, 4) / eps - h));
  }
  CHECK(err[0] / err[1] == doctest::Approx(10.0).epsilon(0.2));
}
