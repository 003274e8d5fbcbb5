#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "vortex/dynamics.hpp"
#include "vortex/stability.hpp"

using namespace vortex;
using oracle::kPi;

namespace {

CriticalPoint family(int n, CriticalPointClass kind) {
  const auto cat = multistart_search(n, 300, 1);
  for (const auto& cp : cat.points) {
    if (cp.kind == kind) return cp;
  }
  FAIL("family not found");
  return {};
}

}  // namespace

TEST_CASE("two-vortex velocities") {
  const double eps = 0.01;
  const auto c = PlanarConfiguration::make({{0.0, 0.0}, {1.0, 0.0}}, {1.0, eps});
  const auto v = vortex_field(c);
  CHECK(std::abs(v[0] - Complex(0.0, -eps)) < 1e-15);
  CHECK(std::abs(v[1] - Complex(0.0, 1.0)) < 1e-15);
}

TEST_CASE("velocities agree with the real-arithmetic oracle") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 6);
    std::vector<Complex> q(m);
    std::vector<std::array<double, 2>> qa(m);
    std::vector<double> g(m);
    for (std::size_t k = 0; k < m; ++k) {
      q[k] = {nd(rng), nd(rng)};
      qa[k] = {q[k].real(), q[k].imag()};
      g[k] = nd(rng);
    }
    const auto v = vortex_field(PlanarConfiguration::make(q, g));
    const auto ref = oracle::velocities(qa, g);
    Complex moment{0.0, 0.0};
    double scale = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      CHECK(std::abs(v[k].real() - ref[k][0]) < 1e-12 * (1.0 + std::abs(ref[k][0])));
      CHECK(std::abs(v[k].imag() - ref[k][1]) < 1e-12 * (1.0 + std::abs(ref[k][1])));
      moment += g[k] * v[k];
      scale += std::abs(g[k] * v[k]);
    }
    CHECK(std::abs(moment) < 1e-13 * scale);
  }
}

TEST_CASE("relative equilibria rotate rigidly in the field") {
  const auto eq = continue_equilibrium(family(3, CriticalPointClass::Saddle), 1e-3);
  const auto c = from_equilibrium(eq);
  const auto v = vortex_field(c);
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(std::abs(v[k] - Complex(0.0, eq.omega) * c.positions[k]) < 1e-11);
  }
}

TEST_CASE("Hamiltonian hand values") {
  CHECK(std::abs(hamiltonian(PlanarConfiguration::make({{0.0, 0.0}, {1.0, 0.0}}, {1.0, 1.0}))) < 1e-15);
  CHECK(hamiltonian(PlanarConfiguration::make({{0.0, 0.0}, {std::exp(1.0), 0.0}}, {1.0, 1.0})) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  std::mt19937_64 rng(43);
  std::normal_distribution<double> nd;
  const std::size_t n = 5;
  std::vector<Complex> q(n);
  for (auto& z : q) z = {nd(rng), nd(rng)};
  const std::vector<double> ones(n, 1.0);
  const double h = hamiltonian(PlanarConfiguration::make(q, ones));
  for (double s : {0.5, 3.0}) {
    auto qs = q;
    for (auto& z : qs) z *= s;
    CHECK(hamiltonian(PlanarConfiguration::make(qs, ones)) ==
          doctest::Approx(h - 0.5 * n * (n - 1) * std::log(s)).epsilon(1e-12));
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(PlanarConfiguration::make({{0.0, 0.0}}, {1.0}), Error);
  CHECK_THROWS_AS(PlanarConfiguration::make({{0.0, 0.0}, {1.0, 0.0}}, {1.0}), Error);
  try {
    PlanarConfiguration::make({{0.0, 0.0}, {0.0, 0.0}}, {1.0, 1.0});
    FAIL("expected VortexCollision");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VortexCollision);
  }
  const auto c = PlanarConfiguration::make({{0.0, 0.0}, {1.0, 0.0}}, {1.0, 1.0});
  CHECK_THROWS_AS(integrate_rk4(c, 0.0, 1.0), Error);
  CHECK_THROWS_AS(integrate_rk4(c, -0.1, 1.0), Error);
}

TEST_CASE("one period of a continued equilibrium") {
  const auto eq = continue_equilibrium(family(3, CriticalPointClass::LocalMin), 1e-3);
  const auto traj = integrate_rk4(from_equilibrium(eq), 2.0 * kPi / 4096.0, 2.0 * kPi);
  CHECK(traj.times.size() == 4097);
  CHECK(traj.times.back() == 2.0 * kPi);
  CHECK(rigidity_error(traj) < 1e-6);
  const auto cons = conservation(traj);
  CHECK(cons.hamiltonian_drift < 1e-8);
  CHECK(cons.impulse_drift < 1e-8);
  CHECK(cons.centre_drift < 1e-8);
}

TEST_CASE("RK4 convergence order") {
  const auto eq = continue_equilibrium(family(3, CriticalPointClass::LocalMin), 1e-3);
  const auto start = from_equilibrium(eq);
  std::vector<double> rot;
  std::vector<double> rig;
  for (int k : {64, 128, 256}) {
    const auto t = integrate_rk4(start, 2.0 * kPi / k, 2.0 * kPi);
    rot.push_back(rotation_error(t, eq.omega));
    rig.push_back(rigidity_error(t));
  }
  for (std::size_t k = 1; k < rot.size(); ++k) {
    const double order = std::log2(rot[k - 1] / rot[k]);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
    // distances only see the amplitude error, which is one order smaller
    CHECK(std::log2(rig[k - 1] / rig[k]) > 4.5);
  }
}

TEST_CASE("rigidity of exact and generic motions") {
  Trajectory exact;
  exact.circulations = {1.0, 0.5, 0.5};
  const std::vector<Complex> q0{{0.1, 0.0}, {1.0, 0.2}, {-0.3, 0.9}};
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    exact.times.push_back(t);
    std::vector<Complex> q = q0;
    for (auto& z : q) z *= std::polar(1.0, 0.7 * t);
    exact.positions.push_back(q);
  }
  CHECK(rigidity_error(exact) < 1e-14);

  const auto generic = PlanarConfiguration::make({{0.0, 0.0}, {1.0, 0.0}, {0.3, 0.4}}, {1.0, 0.5, -0.7});
  CHECK(rigidity_error(integrate_rk4(generic, 1e-3, 1.0)) > 1e-2);
}

TEST_CASE("growth of perturbations") {
  const double eps = 1e-3;
  const auto collinear = continue_equilibrium(family(2, CriticalPointClass::LocalMax), eps);
  const auto unstable = perturbation_growth(collinear);
  const double expected = std::sqrt(2.0 * 1.5 * eps);  // Hessian eigenvalue -3/2
  CHECK(unstable.windowed);
  CHECK(std::abs(unstable.fitted_rate / expected - 1.0) < 0.2);
  CHECK(unstable.predicted_rate == doctest::Approx(expected).epsilon(0.05));

  const auto tri = continue_equilibrium(family(2, CriticalPointClass::LocalMin), eps);
  const auto stable = perturbation_growth(tri);
  CHECK(std::abs(stable.fitted_rate) < 0.1 * unstable.fitted_rate);

  GrowthOptions quiet;
  quiet.amplitude = 0.0;
  quiet.t_end = 2.0 * kPi;
  quiet.step = 2.0 * kPi / 1024.0;
  const auto none = perturbation_growth(tri, quiet);
  CHECK(*std::max_element(none.deviations.begin(), none.deviations.end()) < 1e-10);
}

TEST_CASE("perturbation keeps the vorticity centre") {
  const auto eq = continue_equilibrium(family(3, CriticalPointClass::Saddle), 1e-3);
  const auto a = perturbed_configuration(eq, 1e-4, 7);
  const auto b = perturbed_configuration(eq, 1e-4, 7);
  CHECK(a.positions == b.positions);
  CHECK(std::abs(vorticity_centre(a)) < 1e-16);
}

TEST_CASE("collapsing triple aborts with a partial trajectory") {
  // circulations (2, 2, -1) with zero angular impulse collapse self-similarly
  const auto c = PlanarConfiguration::make({{-1.0, 0.0}, {1.0, 0.0}, {1.0, std::sqrt(2.0)}}, {2.0, 2.0, -1.0});
  PlanarConfiguration mirrored = c;
  for (auto& z : mirrored.positions) z = std::conj(z);
  IntegrationOptions opts;
  opts.collision_sep = 0.05;
  bool aborted = false;
  for (const PlanarConfiguration* start : {&c, static_cast<const PlanarConfiguration*>(&mirrored)}) {
    try {
      integrate_rk4(*start, 1e-3, 20.0, opts);
    } catch (const CollisionAbortError& e) {
      aborted = true;
      CHECK(e.kind() == ErrorKind::CollisionAbort);
      CHECK(e.partial().positions.size() > 1);
      CHECK(e.partial().times.size() == e.partial().positions.size());
    }
  }
  CHECK(aborted);
}

TEST_CASE("trajectory CSV") {
  const auto c = PlanarConfiguration::make({{0.0, 0.0}, {1.0, 0.0}}, {1.0, 0.1});
  const auto t = integrate_rk4(c, 0.5, 1.0);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,x0,y0,x1,y1");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}
