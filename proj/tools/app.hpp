#pragma once

// Command-line front end: configuration, sweeps and output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmet/qmet.hpp"

namespace qmet::app {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr std::size_t kMaxGrid = 100000;

struct Grid {
  double start = 0.0, stop = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      v[i] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
  }
};

inline double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, "cannot read '" + s + "' in " + what);
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

/// "START:STOP:N" or a single value.
inline Grid parse_grid(const std::string& s, const std::string& what) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) return {parse_number(parts[0], what), parse_number(parts[0], what), 1};
  if (parts.size() != 3) fail(ErrorCode::ConfigError, what + " must be START:STOP:N, got '" + s + "'");
  const double n = parse_number(parts[2], what);
  if (n < 1 || n != std::floor(n)) fail(ErrorCode::ConfigError, what + " needs a positive integer point count");
  if (n > static_cast<double>(kMaxGrid)) fail(ErrorCode::ConfigError, what + " has more than 100000 points");
  return {parse_number(parts[0], what), parse_number(parts[1], what), static_cast<std::size_t>(n)};
}

/// "6", "4:10" (inclusive range) or "1,2,4".
inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  auto as_int = [&](const std::string& x) {
    const double v = parse_number(x, what);
    if (v != std::floor(v)) fail(ErrorCode::ConfigError, what + " entries must be integers");
    return static_cast<int>(v);
  };
  std::vector<int> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) fail(ErrorCode::ConfigError, what + " range must be LO:HI");
    const int lo = as_int(parts[0]), hi = as_int(parts[1]);
    if (hi < lo) fail(ErrorCode::ConfigError, what + " range is empty");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
  } else {
    for (const auto& p : split(s, ',')) out.push_back(as_int(p));
  }
  if (out.empty()) fail(ErrorCode::ConfigError, what + " is empty");
  return out;
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct RunConfig {
  std::string command;
  std::string model = "direction";
  ParamMap params;
  std::string theta = "1.0";
  std::string t = "1.0";
  std::string n = "6";
  std::string m = "3";
  double tau = 0.0;
  bool tune_tau = false;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string format = "auto";
  int restarts = 8;
  int iterations = 400;
  std::string diff_method = "richardson";
  double diff_step = 0.0;
  int diff_levels = 2;
  int prep = 0;

  DiffSpec diff() const { return {parse_diff_method(diff_method), diff_step, diff_levels}; }

  std::string resolved_format() const {
    if (format == "auto") return command == "optimize" ? "json" : "csv";
    if (format != "csv" && format != "json") fail(ErrorCode::ConfigError, "format must be csv or json");
    return format;
  }

  /// Every setting that influences the numbers, one "key=value" per line in key order.
  std::string canonical() const {
    std::map<std::string, std::string> kv{{"command", command},
                                          {"model", model},
                                          {"theta", theta},
                                          {"t", t},
                                          {"n", n},
                                          {"m", m},
                                          {"tau", format_number(tau)},
                                          {"tune-tau", tune_tau ? "1" : "0"},
                                          {"seed", std::to_string(seed)},
                                          {"restarts", std::to_string(restarts)},
                                          {"iterations", std::to_string(iterations)},
                                          {"diff-method", diff_method},
                                          {"diff-step", format_number(diff_step)},
                                          {"diff-levels", std::to_string(diff_levels)},
                                          {"prep", std::to_string(prep)}};
    for (const auto& [k, v] : params) kv["param." + k] = format_number(v);
    std::string s;
    for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
    return s;
  }

  std::string hash_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::set<std::string> json_only;  // columns that are not reproducible (timings), left out of CSV
};

/// A grid point that failed numerically; carries the coordinates for the report.
class PointFailure : public std::runtime_error {
 public:
  PointFailure(const std::string& where, const Error& e) : std::runtime_error(where + ": " + e.what()), code_(e.code()) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::size_t worker_count(std::size_t jobs) {
  std::size_t n = 0;
  if (const char* env = std::getenv("QMET_THREADS")) n = static_cast<std::size_t>(std::max(0L, std::strtol(env, nullptr, 10)));
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Evaluate f(0..jobs-1) on a worker pool; results keep index order. The failure with the
/// smallest index is rethrown so that reports do not depend on scheduling.
template <class R, class F>
std::vector<R> parallel_map(std::size_t jobs, F&& f) {
  std::vector<std::optional<R>> slots(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        slots[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(jobs);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(jobs);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline std::string at_point(const char* a, double x, const char* b, double y) {
  return std::string("failed at ") + a + "=" + format_number(x) + ", " + b + "=" + format_number(y);
}

/// Evaluate one grid row, tagging library errors with the point's coordinates.
template <class F>
auto guarded(const char* a, double x, const char* b, double y, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw PointFailure(at_point(a, x, b, y), e);
  }
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

inline double ref_or_nan(const std::string& name, const ParamMap& args) {
  for (const auto& r : reference_registry())
    if (r.name == name) return r(args);
  return kNan;
}

// Closed forms available for a model at (theta, t); NaN where none exists.
struct ModelRefs {
  double qfi = kNan, max_qfi = kNan, g = kNan;
};

inline ModelRefs model_refs(const HamiltonianModel& model, double theta, double t, int prep) {
  ModelRefs r;
  if (model.name == "direction") {
    const double wt = model.param("omega") * t;
    if (prep == 0) r.qfi = ref_or_nan("direction.qfi", {{"theta", theta}, {"omega_t", wt}});
    r.max_qfi = ref_or_nan("direction.max_qfi", {{"omega_t", wt}});
    r.g = ref_or_nan("direction.g", {{"omega_t", wt}});
  } else if (model.name == "xcomponent") {
    const ParamMap a{{"theta", theta}, {"omega", model.param("omega")}, {"t", t}};
    r.max_qfi = ref_or_nan("xcomponent.max_qfi", a);
    r.g = ref_or_nan("xcomponent.g", a);
  } else if (model.name == "nv") {
    const ParamMap a{{"theta", theta}, {"mu", model.param("mu")}, {"E", model.param("E")}, {"t", t}};
    r.max_qfi = ref_or_nan("nv.max_qfi", a);
    r.g = ref_or_nan("nv.g", a);
  }
  return r;
}

inline double rel_err(double x, double ref) {
  if (std::isnan(ref)) return kNan;
  return std::abs(x - ref) / std::max(std::abs(ref), 1e-8);
}

struct GridPoint {
  double theta, t;
};

inline std::vector<GridPoint> theta_t_grid(const RunConfig& cfg) {
  const auto th = parse_grid(cfg.theta, "--theta").values();
  const auto ts = parse_grid(cfg.t, "--t").values();
  if (th.size() * ts.size() > kMaxGrid) fail(ErrorCode::ConfigError, "grid has more than 100000 points");
  std::vector<GridPoint> g;
  for (double a : th)
    for (double b : ts) g.push_back({a, b});
  return g;
}

// ---------------------------------------------------------------------------
// Commands

inline Table cmd_qfi(const RunConfig& cfg) {
  const HamiltonianModel model = make_model(cfg.model, cfg.params);
  const DiffSpec diff = cfg.diff();
  if (cfg.prep < 0 || cfg.prep >= model.dim) fail(ErrorCode::ConfigError, "--prep must index a basis state of the model");
  const PureState psi0 = PureState::basis(model.dim, cfg.prep);
  const auto grid = theta_t_grid(cfg);
  Table tab{{"theta", "t", "qfi", "qfi_ref", "max_qfi", "max_qfi_ref", "abs_err"}, {}, {}};
  tab.rows = parallel_map<std::vector<double>>(grid.size(), [&](std::size_t i) {
    const auto [th, t] = grid[i];
    return guarded("theta", th, "t", t, [&] {
      const double f = qfi(unitary_family(model, t, psi0), th, diff).value;
      const double mq = std::pow(generators(model, th, t, diff).sigma_dyn, 2);
      const ModelRefs r = model_refs(model, th, t, cfg.prep);
      return std::vector<double>{th, t, f, r.qfi, mq, r.max_qfi, std::isnan(r.qfi) ? kNan : std::abs(f - r.qfi)};
    });
  });
  return tab;
}

inline Table cmd_gbound(const RunConfig& cfg) {
  const HamiltonianModel model = make_model(cfg.model, cfg.params);
  const DiffSpec diff = cfg.diff();
  const auto grid = theta_t_grid(cfg);
  Table tab{{"theta", "t", "max_qfi", "sigma_dyn", "sigma_diag", "G", "G_ref", "condition", "gamma", "rel_err"}, {}, {}};
  tab.rows = parallel_map<std::vector<double>>(grid.size(), [&](std::size_t i) {
    const auto [th, t] = grid[i];
    return guarded("theta", th, "t", t, [&] {
      const CemSolution s = g_bound(model, th, t, diff);
      const double mq = s.sigma_dyn * s.sigma_dyn;
      const double g_ref = model_refs(model, th, t, cfg.prep).g;
      return std::vector<double>{th, t, mq, s.sigma_dyn, s.sigma_diag, s.G_value, g_ref, s.condition_holds ? 1.0 : 0.0,
                                 mq / s.G_value, rel_err(s.G_value, g_ref)};
    });
  });
  return tab;
}

inline Table cmd_optimize(const RunConfig& cfg) {
  const HamiltonianModel model = make_model(cfg.model, cfg.params);
  const DiffSpec diff = cfg.diff();
  if (cfg.restarts < 1 || cfg.iterations < 1) fail(ErrorCode::ConfigError, "--restarts and --iterations must be positive");
  const auto grid = theta_t_grid(cfg);
  Table tab{{"theta", "t", "best", "G", "rel_gap", "seed_value", "restarts", "evaluations", "wall_time_s"}, {}, {"wall_time_s"}};
  tab.rows = parallel_map<std::vector<double>>(grid.size(), [&](std::size_t i) {
    const auto [th, t] = grid[i];
    return guarded("theta", th, "t", t, [&] {
      const auto start = std::chrono::steady_clock::now();
      const OptimizeResult r = optimize_cem(model, th, t, {cfg.restarts, cfg.iterations}, cfg.seed, diff);
      const double g = g_bound(model, th, t, diff).G_value;
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return std::vector<double>{th, t, r.best, g, std::abs(r.best - g) / g, r.seed_value, static_cast<double>(r.restarts_used),
                                 static_cast<double>(r.evaluations), wall};
    });
  });
  return tab;
}

inline Table cmd_phase_sim(const RunConfig& cfg) {
  const HamiltonianModel model = make_model(cfg.model, cfg.params);
  const DiffSpec diff = cfg.diff();
  const auto grid = theta_t_grid(cfg);
  const auto ns = parse_int_list(cfg.n, "--n");
  const auto ms = parse_int_list(cfg.m, "--m");
  struct Job {
    GridPoint p;
    int n, m;
  };
  std::vector<Job> jobs;
  for (const auto& p : grid)
    for (int n : ns)
      for (int m : ms) jobs.push_back({p, n, m});
  Table tab{{"theta", "t", "n", "m", "tau", "fi_ideal", "fi_realistic", "G", "ratio"}, {}, {}};
  tab.rows = parallel_map<std::vector<double>>(jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    return guarded("theta", j.p.theta, "t", j.p.t, [&] {
      const CemSolution s = g_bound(model, j.p.theta, j.p.t, diff.method == DiffMethod::Analytic ? DiffSpec{} : diff);
      PhaseSimConfig pc;
      pc.n = j.n;
      pc.m = j.m;
      pc.V = s.V_opt;
      pc.rho0 = DensityMatrix::from_pure(s.psi_opt);
      pc.t = j.p.t;
      pc.tau = cfg.tau;
      if (cfg.tune_tau && cfg.tau <= 0.0) pc.tau = tune_tau(pc, model, j.p.theta, ReadoutMode::Realistic);
      const double tau = resolve_tau(pc, model, j.p.theta);
      pc.tau = tau;
      const double fi = fisher_phase_readout(pc, model, j.p.theta, {}, ReadoutMode::Ideal).value;
      const double fr = fisher_phase_readout(pc, model, j.p.theta, {}, ReadoutMode::Realistic).value;
      return std::vector<double>{j.p.theta, j.p.t, static_cast<double>(j.n), static_cast<double>(j.m), tau, fi, fr, s.G_value,
                                 fr / s.G_value};
    });
  });
  return tab;
}

namespace detail {

inline ComplexVector field_state(double alpha0_sq, Index dim) {
  if (alpha0_sq < 0.0 || alpha0_sq > 1.0) fail(ErrorCode::ConfigError, "--alpha0sq must lie in [0, 1]");
  ComplexVector v = ComplexVector::Zero(dim);
  v(0) = std::sqrt(alpha0_sq);
  v(1) = std::sqrt(1.0 - alpha0_sq);
  return v;
}

inline double param_or(const ParamMap& p, const char* key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace detail

/// Atom (g/e) read-out of a field mode coupled by a resonant Jaynes-Cummings interaction;
/// --theta is the mode frequency grid.
inline Table cmd_jc(const RunConfig& cfg) {
  const double kappa = detail::param_or(cfg.params, "kappa", 0.5);
  const int n_max = static_cast<int>(detail::param_or(cfg.params, "truncation", 8));
  const double a0 = detail::param_or(cfg.params, "alpha0sq", 0.5);
  const HamiltonianModel jc = make_jaynes_cummings(kappa, n_max);
  const HamiltonianModel field = make_field_mode(n_max);
  const DiffSpec diff = cfg.diff();
  const ComplexVector fstate = detail::field_state(a0, n_max + 1);
  const PureState field0(fstate);
  const PureState joint(tensor(ComplexVector(ComplexVector::Unit(2, 0)), fstate));
  const Povm atom({HermitianOperator(tensor((ComplexMatrix(2, 2) << 1, 0, 0, 0).finished(), identity(n_max + 1))),
                   HermitianOperator(tensor((ComplexMatrix(2, 2) << 0, 0, 0, 1).finished(), identity(n_max + 1)))});
  const auto grid = theta_t_grid(cfg);
  Table tab{{"omega", "t", "Omega", "qfi", "fc_sim", "fc_ref", "gamma", "gamma_gt1", "region_ref", "abs_err"}, {}, {}};
  tab.rows = parallel_map<std::vector<double>>(grid.size(), [&](std::size_t i) {
    const auto [w, t] = grid[i];
    return guarded("omega", w, "t", t, [&] {
      const double fq = qfi(unitary_family(field, t, field0), w, diff).value;
      const double fc = fisher_of_povm(unitary_family(jc, t, joint), w, atom, diff).value;
      const double fc_ref = reference("jc.fc")({{"omega", w}, {"kappa", kappa}, {"t", t}, {"alpha1_sq", 1.0 - a0}});
      const double region = reference("jc.region")({{"omega", w}, {"kappa", kappa}, {"t", t}, {"alpha0_sq", a0}});
      double gamma;
      if (fq > 1e-12 * (1.0 + fc))
        gamma = fc / fq;
      else
        gamma = fc > 1e-12 ? std::numeric_limits<double>::infinity() : kNan;
      return std::vector<double>{w, t, kappa * std::sqrt(w), fq, fc, fc_ref, gamma, gamma > 1.0 ? 1.0 : 0.0, region,
                                 std::abs(fc - fc_ref)};
    });
  });
  return tab;
}

/// Closed forms for the displaced oscillator: energy read-out versus QFI over the --t grid.
inline Table cmd_oscillator(const RunConfig& cfg) {
  const double mass = detail::param_or(cfg.params, "mass", 1.0);
  const double omega = detail::param_or(cfg.params, "omega", 1.0);
  if (mass <= 0.0 || omega <= 0.0) fail(ErrorCode::ConfigError, "--mass and --omega must be positive");
  const auto ts = parse_grid(cfg.t, "--t").values();
  Table tab{{"t", "fq", "fc", "gamma", "gamma_ref", "gamma_gt1", "region_ref"}, {}, {}};
  for (double t : ts) {
    const double fq = reference("oscillator.qfi")({{"mass", mass}, {"omega", omega}, {"t", t}});
    const double fc = reference("oscillator.fc")({{"mass", mass}, {"omega", omega}});
    const double gamma = fq > 0.0 ? fc / fq : std::numeric_limits<double>::infinity();
    const double gref = reference("oscillator.gamma")({{"omega", omega}, {"t", t}});
    tab.rows.push_back({t, fq, fc, gamma, gref, gamma > 1.0 ? 1.0 : 0.0, std::abs(std::sin(0.5 * omega * t)) < 0.5 ? 1.0 : 0.0});
  }
  return tab;
}

/// One PASS/FAIL line per property suite; returns whether all passed.
inline bool cmd_selftest(const RunConfig& cfg, std::ostream& os) {
  bool all = true;
  for (const auto& r : run_property_suites(cfg.seed)) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases) " << r.detail << "\n";
    all = all && r.passed;
  }
  return all;
}

// ---------------------------------------------------------------------------
// Output

inline void write_csv(std::ostream& os, const Table& tab, const RunConfig& cfg) {
  os << "# qmet " << kVersion << " command=" << cfg.command << " config-hash=" << cfg.hash_hex() << "\n";
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < tab.columns.size(); ++c)
    if (!tab.json_only.count(tab.columns[c])) keep.push_back(c);
  for (std::size_t k = 0; k < keep.size(); ++k) os << (k ? "," : "") << tab.columns[keep[k]];
  os << "\n";
  for (const auto& row : tab.rows) {
    for (std::size_t k = 0; k < keep.size(); ++k) os << (k ? "," : "") << format_number(row[keep[k]]);
    os << "\n";
  }
}

inline void write_json(std::ostream& os, const Table& tab, const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["version"] = kVersion;
  doc["command"] = cfg.command;
  doc["config_hash"] = cfg.hash_hex();
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& row : tab.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t c = 0; c < tab.columns.size(); ++c) {
      const double x = row[c];
      if (std::isfinite(x))
        rec[tab.columns[c]] = x;
      else if (std::isinf(x))
        rec[tab.columns[c]] = x > 0 ? "inf" : "-inf";
      else
        rec[tab.columns[c]] = nullptr;
    }
    doc["records"].push_back(std::move(rec));
  }
  os << doc.dump(2) << "\n";
}

inline Table dispatch(const RunConfig& cfg) {
  if (cfg.command == "qfi") return cmd_qfi(cfg);
  if (cfg.command == "gbound") return cmd_gbound(cfg);
  if (cfg.command == "optimize") return cmd_optimize(cfg);
  if (cfg.command == "phase-sim") return cmd_phase_sim(cfg);
  if (cfg.command == "jc") return cmd_jc(cfg);
  if (cfg.command == "oscillator") return cmd_oscillator(cfg);
  fail(ErrorCode::ConfigError, "unknown command '" + cfg.command + "'");
}

/// Parse arguments, run, write the output. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fisher information and controlled-energy-measurement bounds for parametrized Hamiltonians", "qmet"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value file; command-line flags take precedence");
  app.set_version_flag("--version", kVersion);

  RunConfig cfg;
  std::map<std::string, double> param_values;
  const std::vector<std::pair<std::string, std::string>> params{
      {"omega", "Angular frequency (direction, xcomponent, oscillator)"},
      {"mu", "Magnetic moment (nv)"},
      {"D", "Axial zero-field splitting (nv)"},
      {"E", "Transverse zero-field splitting (nv)"},
      {"kappa", "Coupling density, Omega = kappa sqrt(omega) (jc)"},
      {"truncation", "Fock cutoff (jc, field)"},
      {"alpha0sq", "Vacuum weight |alpha_0|^2 of the field preparation (jc)"},
      {"mass", "Oscillator mass (oscillator)"}};
  for (const auto& [name, help] : params) app.add_option("--" + name, param_values[name], help);

  app.add_option("--model", cfg.model, "direction | xcomponent | nv | field | jc")->capture_default_str();
  app.add_option("--theta", cfg.theta, "Parameter grid START:STOP:N or a single value")->capture_default_str();
  app.add_option("--t", cfg.t, "Encoding-time grid START:STOP:N or a single value")->capture_default_str();
  app.add_option("--n", cfg.n, "Control-qubit counts: 6, 4:10 or 4,6,8")->capture_default_str();
  app.add_option("--m", cfg.m, "Controllization steps: 3, 1:4 or 1,2,4")->capture_default_str();
  app.add_option("--tau", cfg.tau, "Phase-estimation base time (0 = anti-aliasing default)");
  app.add_flag("--tune-tau", cfg.tune_tau, "Choose tau by maximizing the realistic read-out Fisher information");
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--out", cfg.out, "Output file, - for standard output")->capture_default_str();
  app.add_option("--format", cfg.format, "csv | json (default: json for optimize, csv otherwise)")->capture_default_str();
  app.add_option("--restarts", cfg.restarts, "Optimizer restarts")->capture_default_str();
  app.add_option("--iterations", cfg.iterations, "Coordinate line searches per restart")->capture_default_str();
  app.add_option("--diff-method", cfg.diff_method, "analytic | central | richardson")->capture_default_str();
  app.add_option("--diff-step", cfg.diff_step, "Base step (0 = 1e-4 (1 + |theta|))");
  app.add_option("--diff-levels", cfg.diff_levels, "Richardson levels")->capture_default_str();
  app.add_option("--prep", cfg.prep, "Basis state prepared for the qfi sweep")->capture_default_str();

  for (const char* name : {"qfi", "gbound", "optimize", "phase-sim", "jc", "oscillator", "selftest"})
    app.add_subcommand(name, "")->fallthrough();
  app.get_subcommand("qfi")->description("QFI of a basis-state preparation and the maximum over preparations");
  app.get_subcommand("gbound")->description("Controlled-energy-measurement bound G, its gaps and the tightness condition");
  app.get_subcommand("optimize")->description("Numerical maximization over controls and preparations versus G");
  app.get_subcommand("phase-sim")->description("Fisher information of ideal and realistic phase-estimation read-outs");
  app.get_subcommand("jc")->description("Field-mode frequency read out by a Jaynes-Cummings atom");
  app.get_subcommand("oscillator")->description("Displaced-oscillator energy read-out versus QFI (closed forms)");
  app.get_subcommand("selftest")->description("Randomized property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  for (const auto& [name, help] : params)
    if (app.count("--" + name) > 0) cfg.params[name] = param_values[name];

  try {
    if (cfg.command == "jc") cfg.model = "jc";
    if (cfg.command == "oscillator") cfg.model = "oscillator";
    const std::string fmt = cfg.resolved_format();
    cfg.diff();
    if (cfg.command == "selftest") return cmd_selftest(cfg, out) ? kExitOk : kExitNumerical;
    const Table tab = dispatch(cfg);
    std::ofstream file;
    std::ostream* os = &out;
    if (cfg.out != "-") {
      file.open(cfg.out, std::ios::binary);
      if (!file) fail(ErrorCode::ConfigError, "cannot open output file " + cfg.out);
      os = &file;
    }
    if (fmt == "json")
      write_json(*os, tab, cfg);
    else
      write_csv(*os, tab, cfg);
    return kExitOk;
  } catch (const PointFailure& e) {
    err << "qmet: numerical failure, " << e.what() << "\n";
    if (e.code() == ErrorCode::AliasingRisk) err << "qmet: pass a smaller --tau or omit it to use the anti-aliasing default\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitNumerical;
  } catch (const Error& e) {
    err << "qmet: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidParameter ? kExitConfig : kExitNumerical;
  }
}

}  // namespace qmet::app
