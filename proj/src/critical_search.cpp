#include "vortex/critical_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Ties in the lexicographic gap comparison are resolved at this level so
// roundoff cannot flip the chosen representative.
constexpr double kLexTol = 1e-9;

double wrap(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

// Image of a gap sequence under a cyclic shift, optionally read backwards.
std::vector<double> gap_image(const std::vector<double>& g, std::size_t shift, bool reflect) {
  const std::size_t n = g.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = reflect ? g[(shift + n - k) % n] : g[(shift + k) % n];
  }
  return out;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kLexTol) return a[i] < b[i];
  }
  return false;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Newton direction on the complement of v0 from the bordered system
// [H v0; v0^T 0] [d; mu] = [-g; 0].
Vector newton_direction(const Matrix& h, const Vector& g) {
  const Eigen::Index n = h.rows();
  Matrix k = Matrix::Zero(n + 1, n + 1);
  k.topLeftCorner(n, n) = h;
  k.col(n).head(n).setOnes();
  k.row(n).head(n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs.head(n) = -g;
  Vector sol = k.partialPivLu().solve(rhs);
  if (sol.allFinite()) return sol.head(n);
  // Singular bordered system: fall back to the pseudo-inverse on v0-perp.
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  Vector d = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = es.eigenvalues()(i);
    if (std::abs(lam) > 1e-12 * std::max(1.0, rho)) {
      d -= es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(g) / lam);
    }
  }
  d.array() -= d.mean();
  return d;
}

}  // namespace

double gradient_roundoff_floor(const AngularConfig& theta, const Matrix& h) {
  double amax = 0.0;
  for (double a : theta.angles) amax = std::max(amax, std::abs(a));
  const double row = h.cwiseAbs().rowwise().sum().maxCoeff();
  return 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, amax) * row;
}

double effective_tolerance(const AngularConfig& theta, const Matrix& h, double newton_tol) {
  return std::max(newton_tol, gradient_roundoff_floor(theta, h));
}

PotentialOptions SearchOptions::potential_options() const {
  PotentialOptions p;
  p.collision_sep = collision_sep;
  p.zero_tol = zero_tol;
  // classification happens only after convergence to newton_tol
  p.critical_tol = std::max(newton_tol, 1e-8);
  return p;
}

WedgeConfig to_wedge(const AngularConfig& ordered) {
  WedgeConfig w;
  w.gaps.resize(ordered.size());
  if (ordered.size() == 0) return w;
  w.gaps[0] = 0.0;
  for (std::size_t k = 1; k < ordered.size(); ++k) w.gaps[k] = ordered[k] - ordered[k - 1];
  return w;
}

AngularConfig from_wedge(const WedgeConfig& wedge) {
  std::vector<double> a(wedge.gaps.size(), 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) a[k] = a[k - 1] + wedge.gaps[k];
  return AngularConfig(std::move(a));
}

bool in_wedge_interior(const WedgeConfig& wedge) {
  double total = 0.0;
  for (std::size_t k = 1; k < wedge.gaps.size(); ++k) {
    if (!(wedge.gaps[k] > 0.0)) return false;
    total += wedge.gaps[k];
  }
  return total < kTwoPi;
}

std::vector<double> circular_gaps(const AngularConfig& theta) {
  std::vector<double> a(theta.size());
  std::transform(theta.angles.begin(), theta.angles.end(), a.begin(), wrap);
  std::sort(a.begin(), a.end());
  std::vector<double> g(a.size());
  for (std::size_t k = 0; k + 1 < a.size(); ++k) g[k] = a[k + 1] - a[k];
  if (!a.empty()) g.back() = kTwoPi - (a.back() - a.front());
  return g;
}

AngularConfig canonicalize(const AngularConfig& theta, double collision_sep) {
  if (theta.size() < 2) throw Error(ErrorKind::InvalidN, "canonicalize needs N >= 2");
  if (min_chord(theta) < collision_sep) {
    throw Error(ErrorKind::AngularCollision, "cannot canonicalize a colliding configuration");
  }
  const std::vector<double> g = circular_gaps(theta);
  std::vector<double> best = g;
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (bool reflect : {false, true}) {
      auto img = gap_image(g, s, reflect);
      if (lex_less(img, best)) best = std::move(img);
    }
  }
  std::vector<double> a(g.size(), 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) a[k] = a[k - 1] + best[k - 1];
  return AngularConfig(std::move(a));
}

double symmetry_distance(const AngularConfig& a, const AngularConfig& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const auto ga = circular_gaps(a);
  const auto gb = circular_gaps(b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < gb.size(); ++s) {
    for (bool reflect : {false, true}) best = std::min(best, sup_distance(ga, gap_image(gb, s, reflect)));
  }
  return best;
}

bool is_reflection_symmetric(const AngularConfig& theta, double tol) {
  const auto g = circular_gaps(theta);
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (sup_distance(g, gap_image(g, s, true)) < tol) return true;
  }
  return false;
}

CriticalPoint make_critical_point(const AngularConfig& theta, const SearchOptions& opts) {
  const PotentialOptions popts = opts.potential_options();
  CriticalPoint cp;
  cp.config = theta;
  cp.residual = gradient(theta, popts).cwiseAbs().maxCoeff();
  cp.value = potential(theta, popts);
  const Matrix h = hessian(theta, popts);
  cp.tolerance = effective_tolerance(theta, h, opts.newton_tol);
  cp.spectrum = eig_symmetric(h, opts.zero_tol);
  cp.morse = morse_counts(cp.spectrum);
  cp.kind = classify_counts(cp.morse);
  cp.reflection_symmetric = is_reflection_symmetric(theta, opts.dedup_tol);
  return cp;
}

CriticalPoint newton_refine(const AngularConfig& start, const SearchOptions& opts) {
  if (start.size() < 2) throw Error(ErrorKind::InvalidN, "newton_refine needs N >= 2");
  if (min_chord(start) < opts.collision_sep) {
    throw Error(ErrorKind::CollisionApproach, "start configuration has colliding angles");
  }
  const PotentialOptions popts = opts.potential_options();
  Vector theta = start.as_vector();
  Vector g = gradient(start, popts);

  auto polish_and_finish = [&](const Vector& x) {
    // Re-centre on the canonical representative; its reconstruction moves the
    // angles by roundoff, so take at most a few more Newton steps there.
    AngularConfig canon = canonicalize(AngularConfig::from_vector(x), opts.collision_sep);
    for (int extra = 0; extra < 3; ++extra) {
      const Vector gc = gradient(canon, popts);
      const Matrix hc = hessian(canon, popts);
      if (gc.cwiseAbs().maxCoeff() < effective_tolerance(canon, hc, opts.newton_tol)) break;
      const Vector d = newton_direction(hc, gc);
      AngularConfig trial = AngularConfig::from_vector(canon.as_vector() + d);
      if (min_chord(trial) < opts.collision_sep) break;
      if (gradient(trial, popts).cwiseAbs().maxCoeff() >= gc.cwiseAbs().maxCoeff()) break;
      canon = canonicalize(trial, opts.collision_sep);
    }
    return make_critical_point(canon, opts);
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const double gsup = g.cwiseAbs().maxCoeff();
    const AngularConfig current = AngularConfig::from_vector(theta);
    const Matrix h = hessian(current, popts);
    const double tol = effective_tolerance(current, h, opts.newton_tol);
    if (gsup < tol) return polish_and_finish(theta);

    const Vector dir = newton_direction(h, g);
    const double f0 = g.squaredNorm();

    double t = 1.0;
    bool accepted = false;
    bool any_collision_free = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving, t *= 0.5) {
      const Vector trial = theta + t * dir;
      const AngularConfig trial_cfg = AngularConfig::from_vector(trial);
      if (min_chord(trial_cfg) < opts.collision_sep) continue;
      any_collision_free = true;
      const Vector g1 = gradient(trial_cfg, popts);
      if (g1.squaredNorm() <= f0 * (1.0 - 2e-4 * t)) {
        theta = trial;
        g = g1;
        accepted = true;
        break;
      }
    }
    if (!any_collision_free) {
      throw Error(ErrorKind::CollisionApproach, "every damped Newton step collides");
    }
    if (!accepted) {
      // Stalled at the roundoff floor of the gradient.
      if (gsup < 4.0 * tol) return polish_and_finish(theta);
      std::ostringstream msg;
      msg << "line search failed at iteration " << iter << " with |grad|_inf = " << gsup;
      throw Error(ErrorKind::NoConvergence, msg.str());
    }
  }
  std::ostringstream msg;
  msg << "no convergence after " << opts.max_iterations << " iterations, |grad|_inf = "
      << g.cwiseAbs().maxCoeff();
  throw Error(ErrorKind::NoConvergence, msg.str());
}

AngularConfig descend(const AngularConfig& start, const SearchOptions& opts) {
  if (start.size() < 2) throw Error(ErrorKind::InvalidN, "descend needs N >= 2");
  if (min_chord(start) < opts.collision_sep) {
    throw Error(ErrorKind::CollisionApproach, "start configuration has colliding angles");
  }
  const PotentialOptions popts = opts.potential_options();
  AngularConfig x = start;
  double v = potential(x, popts);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Vector g = gradient(x, popts);
    if (g.cwiseAbs().maxCoeff() < opts.descent_handoff) return x;
    // Saddle-free Newton: invert |H| with eigenvalues floored away from zero,
    // which gives a descent direction for V at every point.
    Eigen::SelfAdjointEigenSolver<Matrix> es(hessian(x, popts));
    const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    const double floor = 1e-6 * std::max(1.0, rho);
    Vector dir = Vector::Zero(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double lam = std::max(std::abs(es.eigenvalues()(i)), floor);
      dir -= es.eigenvectors().col(i) * (es.eigenvectors().col(i).dot(g) / lam);
    }
    dir.array() -= dir.mean();
    const double slope = g.dot(dir);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving, t *= 0.5) {
      const AngularConfig trial = AngularConfig::from_vector(x.as_vector() + t * dir);
      if (min_chord(trial) < opts.collision_sep) continue;
      const double v1 = potential(trial, popts);
      if (v1 <= v + 1e-4 * t * slope) {
        x = trial;
        v = v1;
        accepted = true;
        break;
      }
    }
    if (!accepted) return x;  // Newton takes over from here
  }
  return x;
}

AngularConfig sample_wedge_start(int n, std::uint64_t seed, std::uint64_t index, double margin) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> expo(1.0);
  // Dirichlet(1, ..., 1) weights give the uniform distribution on the simplex.
  const double m = std::min(margin, 0.5 * kTwoPi / n);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) {
    x = expo(rng);
    total += x;
  }
  const double free_length = kTwoPi - n * m;
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) a[k] = a[k - 1] + m + free_length * w[k - 1] / total;
  return AngularConfig(std::move(a));
}

FamilyCatalog multistart_search(int n, int n_starts, std::uint64_t seed, const SearchOptions& opts) {
  if (n < 2) throw Error(ErrorKind::InvalidN, "multistart_search needs N >= 2");
  if (n_starts < 1) throw Error(ErrorKind::InvalidArgument, "need at least one start");

  if (opts.descent_starts < 0) throw Error(ErrorKind::InvalidArgument, "descent_starts must be >= 0");
  const int total = n_starts + opts.descent_starts;
  std::vector<std::optional<CriticalPoint>> results(static_cast<std::size_t>(total));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < total; i = next++) {
      AngularConfig start =
          sample_wedge_start(n, seed, static_cast<std::uint64_t>(i), opts.start_margin);
      try {
        if (i >= n_starts) start = descend(start, opts);
        results[static_cast<std::size_t>(i)] = newton_refine(start, opts);
      } catch (const Error&) {
        // counted as a failed start below
      }
    }
  };
  unsigned threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  FamilyCatalog cat;
  cat.n = n;
  cat.starts = n_starts;
  cat.seed = seed;
  cat.options = opts;
  for (auto& r : results) {
    if (!r || r->residual >= r->tolerance) {
      ++cat.failed_starts;
      continue;
    }
    bool merged = false;
    for (std::size_t k = 0; k < cat.points.size(); ++k) {
      if (symmetry_distance(cat.points[k].config, r->config) < opts.dedup_tol) {
        ++cat.hits[k];
        merged = true;
        break;
      }
    }
    if (!merged) {
      cat.points.push_back(std::move(*r));
      cat.hits.push_back(1);
    }
  }

  std::vector<std::size_t> order(cat.points.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cat.points[a].value < cat.points[b].value;
  });
  std::vector<CriticalPoint> pts;
  std::vector<int> hits;
  for (std::size_t k : order) {
    pts.push_back(std::move(cat.points[k]));
    hits.push_back(cat.hits[k]);
  }
  cat.points = std::move(pts);
  cat.hits = std::move(hits);
  return cat;
}

MorseIndex morse_index(const CriticalPoint& cp) { return morse_counts(cp.spectrum); }

}  // namespace vortex
