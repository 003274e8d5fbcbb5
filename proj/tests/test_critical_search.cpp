#include <doctest.h>

#include "oracles.hpp"
#include "vortex/critical_search.hpp"
#include "vortex/errors.hpp"

using namespace vortex;
using oracle::kPi;

namespace {

AngularConfig cfg(std::vector<double> a) { return AngularConfig(std::move(a)); }

int count_class(const FamilyCatalog& cat, CriticalPointClass c) {
  return static_cast<int>(std::count_if(cat.points.begin(), cat.points.end(),
                                        [&](const CriticalPoint& p) { return p.kind == c; }));
}

}  // namespace

TEST_CASE("canonical form") {
  const auto a = canonicalize(cfg({kPi / 2.0, kPi / 2.0 + kPi}));
  CHECK(std::abs(a[0]) < 1e-15);
  CHECK(a[1] == doctest::Approx(kPi).epsilon(1e-14));

  const auto p = canonicalize(cfg({0.0, kPi / 3.0}));
  const auto q = canonicalize(cfg({0.0, 2.0 * kPi - kPi / 3.0}));
  CHECK(symmetry_distance(p, q) < 1e-14);
  CHECK(oracle::max_abs_diff(p.angles, q.angles) < 1e-14);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto th = cfg(oracle::random_angles(2 + static_cast<std::size_t>(trial % 8), rng));
    const auto once = canonicalize(th);
    const auto twice = canonicalize(once);
    CHECK(oracle::max_abs_diff(once.angles, twice.angles) < 1e-14);
    CHECK(std::abs(potential(once) - potential(th)) < 1e-11);
  }
  CHECK_THROWS_AS(canonicalize(cfg({1.0, 1.0})), Error);
}

TEST_CASE("wedge coordinates round-trip") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto th = cfg(oracle::random_angles(5, rng));
    const auto w = to_wedge(canonicalize(th));
    CHECK(in_wedge_interior(w));
    const auto back = from_wedge(w);
    CHECK(symmetry_distance(back, th) < 1e-12);
  }
}

TEST_CASE("Newton refinement") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd(0.0, 1e-3);
  auto start = ngon(5);
  for (auto& a : start.angles) a += nd(rng);
  const auto cp = newton_refine(start);
  CHECK(symmetry_distance(cp.config, ngon(5)) < 1e-10);
  CHECK(cp.residual < 1e-12);

  const auto tri = newton_refine(cfg({0.0, kPi / 3.0 + 0.05}));
  CHECK(tri.config[1] == doctest::Approx(kPi / 3.0).epsilon(1e-12));
  CHECK(tri.kind == CriticalPointClass::LocalMin);

  try {
    newton_refine(cfg({0.0, 1.0, 1.0}));
    FAIL("expected CollisionApproach");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CollisionApproach);
  }
}

TEST_CASE("small-N catalogs") {
  const auto two = multistart_search(2, 50, 1);
  CHECK(two.points.size() == 2);
  CHECK(count_class(two, CriticalPointClass::LocalMin) == 1);
  CHECK(count_class(two, CriticalPointClass::LocalMax) == 1);

  const auto three = multistart_search(3, 200, 1);
  REQUIRE(three.points.size() == 3);
  CHECK(count_class(three, CriticalPointClass::LocalMin) == 1);
  CHECK(count_class(three, CriticalPointClass::LocalMax) == 1);
  CHECK(count_class(three, CriticalPointClass::Saddle) == 1);
  for (const auto& cp : three.points) {
    if (cp.kind == CriticalPointClass::LocalMin) {
      // two vortices a quarter turn apart from the third, in steps of pi/4
      auto g = circular_gaps(cp.config);
      std::sort(g.begin(), g.end());
      CHECK(g[0] == doctest::Approx(kPi / 4.0).epsilon(1e-10));
      CHECK(g[1] == doctest::Approx(kPi / 4.0).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(multistart_search(1, 10, 1), Error);
}

TEST_CASE("catalog entries are canonical critical points") {
  const auto cat = multistart_search(6, 300, 2);
  for (const auto& cp : cat.points) {
    CHECK(gradient(cp.config).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(oracle::max_abs_diff(canonicalize(cp.config).angles, cp.config.angles) < 1e-14);
    CHECK(morse_index(cp) == cp.morse);
  }
}

TEST_CASE("catalog does not depend on the seed") {
  for (int n : {4, 6, 8}) {
    const auto a = multistart_search(n, 1000, 1);
    const auto b = multistart_search(n, 1000, 2);
    REQUIRE(a.points.size() == b.points.size());
    for (const auto& p : a.points) {
      double best = 1e300;
      for (const auto& q : b.points) best = std::min(best, symmetry_distance(p.config, q.config));
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("search is deterministic under a fixed seed and any thread count") {
  SearchOptions one;
  one.threads = 1;
  SearchOptions many;
  many.threads = 4;
  const auto a = multistart_search(7, 300, 5, one);
  const auto b = multistart_search(7, 300, 5, many);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(a.hits == b.hits);
  for (std::size_t k = 0; k < a.points.size(); ++k) CHECK(a.points[k].config.angles == b.points[k].config.angles);
}

TEST_CASE("Morse indices of the three families") {
  const auto cat = multistart_search(4, 500, 1);
  REQUIRE(cat.points.size() == 3);
  bool has_min = false;
  bool has_ngon = false;
  bool has_third = false;
  for (const auto& cp : cat.points) {
    has_min |= cp.morse == MorseIndex{0, 1, 3};
    has_ngon |= cp.morse == MorseIndex{2, 1, 1} && symmetry_distance(cp.config, ngon(4)) < 1e-9;
    has_third |= cp.morse == MorseIndex{1, 1, 2};
  }
  CHECK(has_min);
  CHECK(has_ngon);
  CHECK(has_third);
}
