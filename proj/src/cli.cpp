#include "vortex/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vortex/dynamics.hpp"
#include "vortex/stability.hpp"

#ifndef VORTEX_RELEQ_VERSION
#define VORTEX_RELEQ_VERSION "0.0.0"
#endif

namespace vortex::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string out = "-";
  std::string format;  // empty: the command's default
  std::optional<double> tol_zero;
  std::optional<double> tol_newton;
  std::uint64_t seed = 1;
  bool plot_data = false;
};

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json complex_list(const std::vector<Complex>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back(complex_json(z));
  return a;
}

json real_parts_json(const SpectrumReport& s) {
  json a = json::array();
  for (const auto& z : s.eigenvalues) a.push_back(z.real());
  return a;
}

json morse_json(const MorseIndex& m) {
  return json{{"negative", m.negative}, {"zero", m.zero}, {"positive", m.positive}};
}

json tool_json() { return json{{"name", tool_name()}, {"version", tool_version()}}; }

json envelope(const json& config, json result) {
  json doc;
  doc["tool"] = tool_json();
  doc["config"] = config;
  doc["result"] = std::move(result);
  return doc;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string csv_preamble(const json& config) {
  return "# " + std::string(tool_name()) + " " + std::string(tool_version()) + "\n# config " +
         config.dump() + "\n";
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string joined(const std::vector<double>& xs, char sep = ' ') {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) s += sep;
    s += fmt(xs[k]);
  }
  return s;
}

// Writes through a temporary file and a rename so readers never see a
// half-written result.
void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, target);
}

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string resolve_format(const GlobalOptions& g, const std::string& fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

json global_config(const std::string& command, const GlobalOptions& g, const std::string& format) {
  json c;
  c["command"] = command;
  c["out"] = g.out;
  c["format"] = format;
  c["seed"] = g.seed;
  c["plot_data"] = g.plot_data;
  return c;
}

json family_json(const CriticalPoint& cp, int id, bool plot) {
  json f;
  f["id"] = id;
  f["class"] = to_string(cp.kind);
  f["morse"] = morse_json(cp.morse);
  f["value"] = cp.value;
  f["residual"] = cp.residual;
  f["tolerance"] = cp.tolerance;
  f["reflection_symmetric"] = cp.reflection_symmetric;
  f["angles"] = cp.config.angles;
  f["gaps"] = circular_gaps(cp.config);
  f["hessian_eigenvalues"] = real_parts_json(cp.spectrum);
  if (plot) {
    json pts = json::array();
    for (double a : cp.config.angles) pts.push_back(json::array({std::cos(a), std::sin(a)}));
    f["plot_points"] = std::move(pts);
  }
  return f;
}

// A family record as written by `find`. The stored Hessian spectrum is taken
// as given (so a catalog can describe a degenerate seed); criticality of the
// angles is rechecked.
CriticalPoint family_from_json(const json& f, double zero_tol) {
  CriticalPoint cp;
  try {
    cp.config = AngularConfig(f.at("angles").get<std::vector<double>>());
    for (double z : f.at("hessian_eigenvalues").get<std::vector<double>>()) cp.spectrum.eigenvalues.emplace_back(z, 0.0);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed family record: ") + e.what());
  }
  if (cp.config.size() < 2 || cp.spectrum.eigenvalues.size() != cp.config.size()) {
    throw UsageError("family record needs N >= 2 angles and N Hessian eigenvalues");
  }
  std::sort(cp.spectrum.eigenvalues.begin(), cp.spectrum.eigenvalues.end(),
            [](const Complex& a, const Complex& b) { return a.real() < b.real(); });
  cp.spectrum.tol_used = zero_tol;
  cp.spectrum.zero_count = count_zeros(cp.spectrum.eigenvalues, zero_tol);
  cp.morse = morse_counts(cp.spectrum);
  cp.kind = classify_counts(cp.morse);
  const Matrix h = hessian(cp.config);
  cp.residual = gradient(cp.config).cwiseAbs().maxCoeff();
  cp.tolerance = effective_tolerance(cp.config, h, 1e-12);
  cp.value = potential(cp.config);
  cp.reflection_symmetric = is_reflection_symmetric(cp.config, 1e-9);
  if (!(cp.residual < std::max(1e-8, 10.0 * cp.tolerance))) {
    throw Error(ErrorKind::NotCritical, "family angles are not a critical point (|grad V| = " +
                                            fmt(cp.residual) + ")");
  }
  return cp;
}

json equilibrium_json(const RelativeEquilibrium& eq, bool plot) {
  json e;
  e["epsilon"] = eq.epsilon;
  e["omega"] = eq.omega;
  e["residual"] = eq.residual;
  e["r"] = eq.r;
  e["theta"] = eq.theta;
  e["strong_position"] = complex_json(eq.strong_position());
  if (plot) {
    json pts = json::array();
    pts.push_back(complex_json(eq.strong_position()));
    for (const auto& z : eq.weak_positions()) pts.push_back(complex_json(z));
    e["plot_points"] = std::move(pts);
  }
  return e;
}

RelativeEquilibrium equilibrium_from_json(const json& e, const CriticalPoint& seed) {
  RelativeEquilibrium eq;
  try {
    eq.r = e.at("r").get<std::vector<double>>();
    eq.theta = e.at("theta").get<std::vector<double>>();
    eq.epsilon = e.at("epsilon").get<double>();
    eq.omega = e.value("omega", 1.0);
  } catch (const json::exception& ex) {
    throw UsageError(std::string("malformed equilibrium record: ") + ex.what());
  }
  if (eq.r.size() != eq.theta.size() || eq.r.size() != seed.config.size()) {
    throw UsageError("equilibrium size does not match its family");
  }
  if (eq.epsilon == 0.0 || !std::isfinite(eq.epsilon)) throw UsageError("equilibrium epsilon must be nonzero");
  eq.residual = rotating_frame_residual(eq.state(), eq.epsilon, eq.omega).cwiseAbs().maxCoeff();
  eq.source = seed;
  return eq;
}

json scaling_json(const std::vector<RelativeEquilibrium>& eqs, bool positive) {
  std::vector<RelativeEquilibrium> side;
  for (const auto& eq : eqs) {
    if ((eq.epsilon > 0.0) == positive) side.push_back(eq);
  }
  try {
    const ScalingReport rep = verify_scaling_bounds(side);
    return json{{"epsilon", rep.epsilon},
                {"strong_ratio", rep.strong_ratio},
                {"radius_ratio", rep.radius_ratio},
                {"strong_spread", rep.strong_spread},
                {"radius_spread", rep.radius_spread},
                {"bounded", rep.bounded}};
  } catch (const Error& e) {
    return json{{"skipped", e.what()}};
  }
}

// Relative mismatch between the nonzero eigenvalue magnitudes and the
// asymptotic prediction, both sorted; empty when the counts differ.
std::optional<double> prediction_mismatch(const StabilityVerdict& v, const std::vector<Complex>& predicted) {
  std::vector<double> got;
  std::vector<double> want;
  for (const auto& z : v.spectrum.eigenvalues) {
    if (std::abs(z) >= v.zero_threshold) got.push_back(std::abs(z));
  }
  for (const auto& z : predicted) want.push_back(std::abs(z));
  if (got.size() != want.size()) return std::nullopt;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < got.size(); ++k) worst = std::max(worst, std::abs(got[k] - want[k]) / want[k]);
  return worst;
}

// ---- commands -------------------------------------------------------------

struct FindArgs {
  int n = 0;
  int starts = 500;
  int descent_starts = 0;
  unsigned threads = 0;
};

int cmd_find(const FindArgs& a, const GlobalOptions& g, std::ostream& out) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (a.starts < 1) throw UsageError("--starts must be positive");
  if (a.descent_starts < 0) throw UsageError("--descent-starts must be >= 0");
  const std::string format = resolve_format(g, "json");
  SearchOptions opts;
  if (g.tol_zero) opts.zero_tol = *g.tol_zero;
  if (g.tol_newton) opts.newton_tol = *g.tol_newton;
  opts.descent_starts = a.descent_starts;
  opts.threads = a.threads;

  json config = global_config("find", g, format);
  config["n"] = a.n;
  config["starts"] = a.starts;
  config["descent_starts"] = a.descent_starts;
  config["tol_zero"] = opts.zero_tol;
  config["tol_newton"] = opts.newton_tol;
  config["dedup_tol"] = opts.dedup_tol;
  config["max_iterations"] = opts.max_iterations;
  config["start_margin"] = opts.start_margin;

  const FamilyCatalog cat = multistart_search(a.n, a.starts, g.seed, opts);

  if (format == "csv") {
    std::string s = csv_preamble(config);
    s += "id,class,negative,zero,positive,value,residual,hits,angles,hessian_eigenvalues\n";
    for (std::size_t k = 0; k < cat.points.size(); ++k) {
      const auto& cp = cat.points[k];
      s += std::to_string(k) + "," + std::string(to_string(cp.kind)) + "," + std::to_string(cp.morse.negative) + "," +
           std::to_string(cp.morse.zero) + "," + std::to_string(cp.morse.positive) + "," + fmt(cp.value) + "," +
           fmt(cp.residual) + "," + std::to_string(cat.hits[k]) + "," + joined(cp.config.angles) + "," +
           joined(cp.spectrum.real_parts()) + "\n";
    }
    write_output(g.out, s, out);
    return kExitOk;
  }
  json result;
  result["n"] = cat.n;
  result["starts"] = cat.starts;
  result["descent_starts"] = a.descent_starts;
  result["failed_starts"] = cat.failed_starts;
  json fams = json::array();
  for (std::size_t k = 0; k < cat.points.size(); ++k) {
    json f = family_json(cat.points[k], static_cast<int>(k), g.plot_data);
    f["hits"] = cat.hits[k];
    fams.push_back(std::move(f));
  }
  result["families"] = std::move(fams);
  write_output(g.out, dump(envelope(config, std::move(result))), out);
  return kExitOk;
}

int cmd_ngon_spectrum(int n, const GlobalOptions& g, std::ostream& out) {
  if (n < 3) throw UsageError("--n must be at least 3");
  const std::string format = resolve_format(g, "csv");
  json config = global_config("ngon-spectrum", g, format);
  config["n"] = n;

  const auto closed = ngon_spectrum_closed_form(n);
  std::vector<std::pair<double, int>> indexed;
  for (int j = 0; j < n; ++j) indexed.emplace_back(closed[static_cast<std::size_t>(j)], j);
  std::stable_sort(indexed.begin(), indexed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const SpectrumReport dense = eig_symmetric(hessian(ngon(n)));

  double worst = 0.0;
  json rows = json::array();
  std::string s = csv_preamble(config) + "j,closed_form,dense,abs_difference\n";
  for (std::size_t k = 0; k < indexed.size(); ++k) {
    const double d = dense.eigenvalues[k].real();
    const double diff = std::abs(indexed[k].first - d);
    worst = std::max(worst, diff);
    rows.push_back(json{{"j", indexed[k].second}, {"closed_form", indexed[k].first}, {"dense", d}, {"abs_difference", diff}});
    s += std::to_string(indexed[k].second) + "," + fmt(indexed[k].first) + "," + fmt(d) + "," + fmt(diff) + "\n";
  }
  if (format == "csv") {
    write_output(g.out, s, out);
  } else {
    json result{{"n", n}, {"rows", std::move(rows)}, {"max_abs_difference", worst}};
    write_output(g.out, dump(envelope(config, std::move(result))), out);
  }
  return kExitOk;
}

struct ContinueArgs {
  std::string catalog;
  int family = -1;
  std::vector<double> eps;
};

int cmd_continue(const ContinueArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  if (a.eps.empty()) throw UsageError("--eps needs at least one value");
  for (double e : a.eps) {
    if (e == 0.0 || !std::isfinite(e)) throw UsageError("--eps values must be finite and nonzero");
  }
  const std::string format = resolve_format(g, "json");
  const json catalog = read_json(a.catalog);
  json families;
  try {
    families = catalog.at("result").at("families");
  } catch (const json::exception& e) {
    throw UsageError(a.catalog + " is not a catalog: " + e.what());
  }
  if (a.family < 0 || static_cast<std::size_t>(a.family) >= families.size()) {
    throw UsageError("--family out of range (catalog has " + std::to_string(families.size()) + " families)");
  }
  const double zero_tol = g.tol_zero.value_or(kDefaultZeroTol);
  const CriticalPoint cp = family_from_json(families.at(static_cast<std::size_t>(a.family)), zero_tol);

  ContinuationOptions opts;
  if (g.tol_newton) opts.releq_tol = *g.tol_newton;
  const double ceiling = epsilon_ceiling_for(cp, opts);
  for (double e : a.eps) {
    if (std::abs(e) > ceiling) throw UsageError("|epsilon| = " + fmt(std::abs(e)) + " exceeds the ceiling " + fmt(ceiling));
  }
  std::vector<double> eps = a.eps;
  std::stable_sort(eps.begin(), eps.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });

  json config = global_config("continue", g, format);
  config["catalog"] = a.catalog;
  config["family"] = a.family;
  config["eps"] = eps;
  config["tol_zero"] = zero_tol;
  config["tol_newton"] = opts.releq_tol;
  config["epsilon_ceiling"] = ceiling;
  config["max_iterations"] = opts.max_iterations;

  const SweepResult sweep = sweep_epsilon(cp, eps, opts);

  if (format == "csv") {
    const std::size_t n = cp.config.size();
    std::string s = csv_preamble(config) + "epsilon,residual";
    for (std::size_t j = 1; j <= n; ++j) s += ",r" + std::to_string(j);
    for (std::size_t j = 1; j <= n; ++j) s += ",theta" + std::to_string(j);
    s += "\n";
    for (const auto& eq : sweep.equilibria) {
      s += fmt(eq.epsilon) + "," + fmt(eq.residual) + "," + joined(eq.r, ',') + "," + joined(eq.theta, ',') + "\n";
    }
    write_output(g.out, s, out);
  } else {
    json result;
    result["family"] = family_json(cp, a.family, false);
    json eqs = json::array();
    for (const auto& eq : sweep.equilibria) eqs.push_back(equilibrium_json(eq, g.plot_data));
    result["equilibria"] = std::move(eqs);
    result["scaling"] = json{{"positive", scaling_json(sweep.equilibria, true)},
                             {"negative", scaling_json(sweep.equilibria, false)}};
    result["failure"] = sweep.failure ? json(sweep.failure->what()) : json(nullptr);
    write_output(g.out, dump(envelope(config, std::move(result))), out);
  }
  if (sweep.failure) {
    err << "error: " << sweep.failure->what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct LoadedEquilibria {
  CriticalPoint seed;
  std::vector<RelativeEquilibrium> equilibria;
};

LoadedEquilibria load_equilibria(const std::string& path, double zero_tol) {
  const json doc = read_json(path);
  LoadedEquilibria out;
  try {
    const json& result = doc.at("result");
    out.seed = family_from_json(result.at("family"), zero_tol);
    for (const auto& e : result.at("equilibria")) out.equilibria.push_back(equilibrium_from_json(e, out.seed));
  } catch (const json::exception& e) {
    throw UsageError(path + " is not an equilibria file: " + e.what());
  }
  return out;
}

struct StabilityArgs {
  std::string equilibria;
  double imag_tol = 1e-4;
};

int cmd_stability(const StabilityArgs& a, const GlobalOptions& g, std::ostream& out) {
  const std::string format = resolve_format(g, "json");
  StabilityOptions opts;
  if (g.tol_zero) opts.zero_tol = *g.tol_zero;
  opts.imag_rel_tol = a.imag_tol;
  const LoadedEquilibria loaded = load_equilibria(a.equilibria, kDefaultZeroTol);

  json config = global_config("stability", g, format);
  config["equilibria"] = a.equilibria;
  config["tol_zero"] = opts.zero_tol;
  config["imag_tol"] = opts.imag_rel_tol;
  config["fd_step"] = opts.linearization.fd_step;
  config["richardson_tol"] = opts.linearization.richardson_tol;

  json verdicts = json::array();
  std::string csv = csv_preamble(config) + "index,epsilon,classification,k,re,im\n";
  for (std::size_t k = 0; k < loaded.equilibria.size(); ++k) {
    const auto& eq = loaded.equilibria[k];
    const StabilityVerdict v = stability_verdict(eq, opts);
    const auto predicted = asymptotic_eigenvalues(loaded.seed, eq.epsilon);
    const auto mismatch = prediction_mismatch(v, predicted);
    json j;
    j["epsilon"] = eq.epsilon;
    j["seed_class"] = to_string(loaded.seed.kind);
    j["classification"] = to_string(v.classification);
    j["n_zero"] = v.n_zero;
    j["instability_count"] = v.instability_count;
    j["max_real_part"] = v.max_real_part;
    j["zero_threshold"] = v.zero_threshold;
    j["eigenvalues"] = complex_list(v.spectrum.eigenvalues);
    j["predicted_eigenvalues"] = complex_list(predicted);
    j["prediction_mismatch"] = mismatch ? json(*mismatch) : json(nullptr);
    if (v.classification == StabilityClass::LinearlyStable) {
      const PairingReport p = skew_pairing_check(eq, opts);
      j["pairing"] = json{{"scaled", p.scaled_pairing}, {"nondegenerate", p.nondegenerate}};
    }
    verdicts.push_back(std::move(j));
    for (std::size_t i = 0; i < v.spectrum.eigenvalues.size(); ++i) {
      const auto& z = v.spectrum.eigenvalues[i];
      csv += std::to_string(k) + "," + fmt(eq.epsilon) + "," + std::string(to_string(v.classification)) + "," +
             std::to_string(i) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "\n";
    }
  }
  if (format == "csv") {
    write_output(g.out, csv, out);
  } else {
    write_output(g.out, dump(envelope(config, json{{"verdicts", std::move(verdicts)}})), out);
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string equilibria;
  int index = 0;
  double h = 2.0 * std::numbers::pi / 4096.0;
  double t_end = 2.0 * std::numbers::pi;
  double perturb = 0.0;
  std::string report;
};

json trajectory_json(const Trajectory& t) {
  json positions = json::array();
  for (const auto& q : t.positions) positions.push_back(complex_list(q));
  return json{{"integrator", t.integrator},
              {"step", t.step},
              {"circulations", t.circulations},
              {"times", t.times},
              {"positions", std::move(positions)}};
}

int cmd_simulate(const SimulateArgs& a, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  if (!(a.h > 0.0) || !std::isfinite(a.h)) throw UsageError("--h must be positive");
  if (!(a.t_end > 0.0) || !std::isfinite(a.t_end)) throw UsageError("--T must be positive");
  if (!(a.perturb >= 0.0) || !std::isfinite(a.perturb)) throw UsageError("--perturb must be >= 0");
  const std::string format = resolve_format(g, "csv");
  const LoadedEquilibria loaded = load_equilibria(a.equilibria, g.tol_zero.value_or(kDefaultZeroTol));
  if (a.index < 0 || static_cast<std::size_t>(a.index) >= loaded.equilibria.size()) {
    throw UsageError("--index out of range");
  }
  const RelativeEquilibrium& eq = loaded.equilibria[static_cast<std::size_t>(a.index)];
  std::string report_path = a.report;
  if (report_path.empty() && format == "csv" && g.out != "-") report_path = g.out + ".report.json";

  json config = global_config("simulate", g, format);
  config["equilibria"] = a.equilibria;
  config["index"] = a.index;
  config["h"] = a.h;
  config["T"] = a.t_end;
  config["perturb"] = a.perturb;
  config["report"] = report_path;

  const PlanarConfiguration reference = from_equilibrium(eq);
  const PlanarConfiguration start = a.perturb > 0.0 ? perturbed_configuration(eq, a.perturb, g.seed) : reference;

  Trajectory traj;
  std::optional<std::string> aborted;
  try {
    traj = integrate_rk4(start, a.h, a.t_end);
  } catch (const CollisionAbortError& e) {
    traj = e.partial();
    aborted = e.what();
  }

  json report;
  report["steps"] = traj.times.size() - 1;
  report["step"] = traj.step;
  report["t_reached"] = traj.times.back();
  report["rigidity_error"] = rigidity_error(traj);
  report["rotation_error"] = rotation_error(traj, eq.omega);
  const ConservationReport c = conservation(traj);
  report["conservation"] = json{{"hamiltonian_drift", c.hamiltonian_drift},
                                {"impulse_drift", c.impulse_drift},
                                {"centre_drift", c.centre_drift}};
  if (a.perturb > 0.0) {
    GrowthOptions go;
    go.amplitude = a.perturb;
    const GrowthReport gr = fit_growth(traj, reference, go);
    const double predicted = std::max(0.0, stability_verdict(eq).max_real_part);
    report["growth"] = json{{"fitted_rate", gr.fitted_rate},
                            {"predicted_rate", predicted},
                            {"windowed", gr.windowed},
                            {"samples_used", gr.samples_used},
                            {"initial_deviation", gr.initial_deviation},
                            {"final_deviation", gr.final_deviation}};
  }
  report["aborted"] = aborted ? json(*aborted) : json(nullptr);

  if (format == "csv") {
    std::ostringstream csv;
    csv << csv_preamble(config);
    write_trajectory_csv(csv, traj);
    write_output(g.out, csv.str(), out);
    if (!report_path.empty()) write_output(report_path, dump(envelope(config, report)), out);
  } else {
    json result = report;
    result["trajectory"] = trajectory_json(traj);
    write_output(g.out, dump(envelope(config, std::move(result))), out);
  }
  if (aborted) {
    err << "error: " << *aborted << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidN:
    case ErrorKind::InvalidEpsilon:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

}  // namespace

std::string_view tool_name() { return "vortex-releq"; }
std::string_view tool_version() { return VORTEX_RELEQ_VERSION; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative equilibria of one strong and N weak point vortices", std::string(tool_name())};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  GlobalOptions g;
  app.add_option("--out", g.out, "Output file ('-' for stdout)")->capture_default_str();
  app.add_option("--format", g.format, "Output format: json or csv (default depends on the command)");
  app.add_option("--tol-zero", g.tol_zero, "Zero-eigenvalue tolerance");
  app.add_option("--tol-newton", g.tol_newton, "Newton residual tolerance");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_flag("--plot-data", g.plot_data, "Include point lists for plotting");
  app.fallthrough();

  FindArgs find_args;
  auto* find = app.add_subcommand("find", "Multistart search for critical points of the limit potential");
  find->add_option("--n", find_args.n, "Number of weak vortices")->required();
  find->add_option("--starts", find_args.starts, "Newton starts")->capture_default_str();
  find->add_option("--descent-starts", find_args.descent_starts, "Extra starts that descend V first")
      ->capture_default_str();
  find->add_option("--threads", find_args.threads, "Worker threads (0: all cores)")->capture_default_str();

  int ngon_n = 0;
  auto* ngon_cmd = app.add_subcommand("ngon-spectrum", "Closed-form vs dense Hessian spectrum at the N-gon");
  ngon_cmd->add_option("--n", ngon_n, "Number of weak vortices")->required();

  ContinueArgs cont_args;
  auto* cont = app.add_subcommand("continue", "Continue a family to relative equilibria at small epsilon");
  cont->add_option("--catalog", cont_args.catalog, "Catalog written by find")->required();
  cont->add_option("--family", cont_args.family, "Family id in the catalog")->required();
  cont->add_option("--eps", cont_args.eps, "Comma-separated epsilon values")->required()->delimiter(',');

  StabilityArgs stab_args;
  auto* stab = app.add_subcommand("stability", "Linear stability of continued equilibria");
  stab->add_option("--equilibria", stab_args.equilibria, "File written by continue")->required();
  stab->add_option("--imag-tol", stab_args.imag_tol, "Relative pure-imaginary tolerance")->capture_default_str();

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Integrate an equilibrium with RK4");
  sim->set_help_flag("--help", "Print this help message and exit");  // frees the name h for the step
  sim->add_option("--equilibria", sim_args.equilibria, "File written by continue")->required();
  sim->add_option("--index", sim_args.index, "Equilibrium index in the file")->capture_default_str();
  sim->add_option("--h", sim_args.h, "Step size")->capture_default_str();
  sim->add_option("--T", sim_args.t_end, "Final time")->capture_default_str();
  sim->add_option("--perturb", sim_args.perturb, "Perturbation amplitude")->capture_default_str();
  sim->add_option("--report", sim_args.report, "Report path (default: <out>.report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*find) return cmd_find(find_args, g, out);
    if (*ngon_cmd) return cmd_ngon_spectrum(ngon_n, g, out);
    if (*cont) return cmd_continue(cont_args, g, out, err);
    if (*stab) return cmd_stability(stab_args, g, out);
    if (*sim) return cmd_simulate(sim_args, g, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace vortex::cli
