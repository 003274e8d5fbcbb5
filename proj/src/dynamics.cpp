#include "vortex/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "vortex/stability.hpp"

namespace vortex {

namespace {

constexpr Complex kI{0.0, 1.0};

double min_separation(const std::vector<Complex>& q) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q.size(); ++a) {
    for (std::size_t b = a + 1; b < q.size(); ++b) best = std::min(best, std::abs(q[a] - q[b]));
  }
  return best;
}

std::vector<Complex> field(const std::vector<Complex>& q, const std::vector<double>& gamma) {
  std::vector<Complex> v(q.size(), Complex{0.0, 0.0});
  for (std::size_t j = 0; j < q.size(); ++j) {
    for (std::size_t i = j + 1; i < q.size(); ++i) {
      const Complex d = q[j] - q[i];
      const Complex w = kI * d / std::norm(d);
      v[j] += gamma[i] * w;
      v[i] -= gamma[j] * w;
    }
  }
  return v;
}

void axpy(std::vector<Complex>& out, const std::vector<Complex>& x, double a, const std::vector<Complex>& y) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k] + a * y[k];
}

double max_pair_distance_change(const std::vector<Complex>& q, const std::vector<Complex>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      worst = std::max(worst, std::abs(std::abs(q[i] - q[j]) - std::abs(ref[i] - ref[j])));
    }
  }
  return worst;
}

}  // namespace

PlanarConfiguration PlanarConfiguration::make(std::vector<Complex> positions,
                                              std::vector<double> circulations, double collision_sep) {
  if (positions.size() != circulations.size()) {
    throw Error(ErrorKind::DimensionMismatch, "positions and circulations differ in length");
  }
  if (positions.size() < 2) throw Error(ErrorKind::InvalidN, "need at least two vortices");
  if (min_separation(positions) < collision_sep) {
    throw Error(ErrorKind::VortexCollision, "two vortices coincide");
  }
  PlanarConfiguration c;
  c.positions = std::move(positions);
  c.circulations = std::move(circulations);
  c.vorticity_centre = vortex::vorticity_centre(c);
  return c;
}

PlanarConfiguration from_equilibrium(const RelativeEquilibrium& eq) {
  const auto weak = eq.weak_positions();
  std::vector<Complex> q;
  q.reserve(weak.size() + 1);
  q.push_back(strong_position(weak, eq.epsilon));
  q.insert(q.end(), weak.begin(), weak.end());
  std::vector<double> gamma(q.size(), eq.epsilon);
  gamma[0] = 1.0;
  return PlanarConfiguration::make(std::move(q), std::move(gamma));
}

PlanarConfiguration Trajectory::at(std::size_t k) const {
  PlanarConfiguration c;
  c.positions = positions.at(k);
  c.circulations = circulations;
  c.vorticity_centre = vorticity_centre(c);
  return c;
}

std::vector<Complex> vortex_field(const PlanarConfiguration& c, double collision_sep) {
  if (min_separation(c.positions) < collision_sep) {
    throw Error(ErrorKind::VortexCollision, "two vortices coincide");
  }
  return field(c.positions, c.circulations);
}

double hamiltonian(const PlanarConfiguration& c, double collision_sep) {
  double h = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = std::abs(c.positions[i] - c.positions[j]);
      if (d < collision_sep) throw Error(ErrorKind::VortexCollision, "two vortices coincide");
      h -= c.circulations[i] * c.circulations[j] * std::log(d);
    }
  }
  return h;
}

double angular_impulse(const PlanarConfiguration& c) {
  double m = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) m += c.circulations[i] * std::norm(c.positions[i]);
  return m;
}

Complex vorticity_centre(const PlanarConfiguration& c) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < c.size(); ++i) s += c.circulations[i] * c.positions[i];
  return s;
}

Trajectory integrate_rk4(const PlanarConfiguration& c, double h, double t_end,
                         const IntegrationOptions& opts) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorKind::InvalidArgument, "T must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  const double dt = t_end / static_cast<double>(steps);
  const double guard = opts.abort_factor * opts.collision_sep;

  Trajectory traj;
  traj.circulations = c.circulations;
  traj.step = dt;
  traj.times.reserve(steps + 1);
  traj.positions.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.positions.push_back(c.positions);

  const auto& g = c.circulations;
  std::vector<Complex> q = c.positions;
  std::vector<Complex> tmp(q.size());
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto k1 = field(q, g);
    axpy(tmp, q, 0.5 * dt, k1);
    const auto k2 = field(tmp, g);
    axpy(tmp, q, 0.5 * dt, k2);
    const auto k3 = field(tmp, g);
    axpy(tmp, q, dt, k3);
    const auto k4 = field(tmp, g);
    for (std::size_t j = 0; j < q.size(); ++j) {
      q[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    if (!(min_separation(q) >= guard)) {
      std::ostringstream msg;
      msg << "vortices came within " << guard << " at t = " << static_cast<double>(k) * dt;
      throw CollisionAbortError(msg.str(), std::move(traj));
    }
    traj.times.push_back(k == steps ? t_end : static_cast<double>(k) * dt);
    traj.positions.push_back(q);
  }
  return traj;
}

double rigidity_error(const Trajectory& t) {
  if (t.positions.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  double worst = 0.0;
  for (const auto& q : t.positions) worst = std::max(worst, max_pair_distance_change(q, t.positions.front()));
  return worst;
}

double rotation_error(const Trajectory& t, double omega) {
  if (t.positions.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  double worst = 0.0;
  const auto& q0 = t.positions.front();
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const Complex turn = std::polar(1.0, omega * t.times[k]);
    for (std::size_t j = 0; j < q0.size(); ++j) worst = std::max(worst, std::abs(t.positions[k][j] - turn * q0[j]));
  }
  return worst;
}

ConservationReport conservation(const Trajectory& t) {
  if (t.positions.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  const PlanarConfiguration first = t.at(0);
  const double h0 = hamiltonian(first);
  const double i0 = angular_impulse(first);
  const Complex c0 = vorticity_centre(first);
  double dh = 0.0;
  double di = 0.0;
  double dc = 0.0;
  for (std::size_t k = 0; k < t.positions.size(); ++k) {
    const PlanarConfiguration c = t.at(k);
    dh = std::max(dh, std::abs(hamiltonian(c) - h0));
    di = std::max(di, std::abs(angular_impulse(c) - i0));
    dc = std::max(dc, std::abs(vorticity_centre(c) - c0));
  }
  auto relative = [](double drift, double ref) { return ref != 0.0 ? drift / std::abs(ref) : drift; };
  ConservationReport rep;
  rep.hamiltonian_drift = relative(dh, h0);
  rep.impulse_drift = relative(di, i0);
  rep.centre_drift = dc / std::max(1.0, std::abs(c0));
  return rep;
}

PlanarConfiguration perturbed_configuration(const RelativeEquilibrium& eq, double amplitude,
                                            std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw Error(ErrorKind::InvalidArgument, "amplitude must be >= 0");
  const PlanarConfiguration base = from_equilibrium(eq);
  const std::size_t n = eq.r.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> kick(n);
  double norm2 = 0.0;
  for (auto& k : kick) {
    k = Complex(normal(rng), normal(rng));
    norm2 += std::norm(k);
  }
  std::vector<Complex> weak(base.positions.begin() + 1, base.positions.end());
  for (std::size_t j = 0; j < n; ++j) weak[j] += amplitude / std::sqrt(norm2) * kick[j];
  std::vector<Complex> q;
  q.reserve(n + 1);
  q.push_back(strong_position(weak, eq.epsilon));
  q.insert(q.end(), weak.begin(), weak.end());
  return PlanarConfiguration::make(std::move(q), base.circulations);
}

GrowthReport fit_growth(const Trajectory& traj, const PlanarConfiguration& reference,
                        const GrowthOptions& opts) {
  GrowthReport rep;
  rep.times = traj.times;
  rep.deviations.reserve(traj.positions.size());
  for (const auto& p : traj.positions) rep.deviations.push_back(max_pair_distance_change(p, reference.positions));
  rep.initial_deviation = rep.deviations.front();
  rep.final_deviation = rep.deviations.back();

  // least-squares slope of log(deviation) against t over the kept samples
  auto fit = [&](auto&& keep) {
    double s = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      const double d = rep.deviations[k];
      if (!(d > 0.0) || !keep(d)) continue;
      const double t = rep.times[k];
      const double y = std::log(d);
      s += 1.0;
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      ++used;
    }
    const double denom = s * stt - st * st;
    return std::pair{used, used >= 2 && denom > 0.0 ? (s * sty - st * sy) / denom : 0.0};
  };
  const double lo = opts.window_low_factor * opts.amplitude;
  auto [used, rate] = fit([&](double d) { return d >= lo && d <= opts.window_high; });
  rep.windowed = used >= opts.min_window_samples;
  if (!rep.windowed) std::tie(used, rate) = fit([](double) { return true; });
  rep.samples_used = used;
  rep.fitted_rate = rate;
  return rep;
}

GrowthReport perturbation_growth(const RelativeEquilibrium& eq, const GrowthOptions& opts) {
  const PlanarConfiguration start = perturbed_configuration(eq, opts.amplitude, opts.seed);
  const Trajectory traj = integrate_rk4(start, opts.step, opts.t_end);
  GrowthReport rep = fit_growth(traj, from_equilibrium(eq), opts);
  rep.predicted_rate = std::max(0.0, stability_verdict(eq).max_real_part);
  return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  const auto old_precision = os.precision(17);
  os << "t";
  const std::size_t m = t.circulations.size();
  for (std::size_t j = 0; j < m; ++j) os << ",x" << j << ",y" << j;
  os << '\n';
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    os << t.times[k];
    for (const auto& z : t.positions[k]) os << ',' << z.real() << ',' << z.imag();
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace vortex
