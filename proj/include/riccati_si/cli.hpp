#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "dense_oracle.hpp"
#include "history.hpp"
#include "ilrsi.hpp"
#include "matrix_market.hpp"
#include "problem.hpp"
#include "rksm.hpp"
#include "shifts.hpp"

namespace riccati_si::cli {

using nlohmann::json;

enum ExitCode : int {
  kConverged = 0,
  kConfigError = 1,
  kMaxIter = 2,
  kBreakdown = 3,
  kVerifyFailed = 4,
};

inline int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return kConverged;
    case SolveStatus::breakdown: return kBreakdown;
    default: return kMaxIter;
  }
}

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

// ---------------------------------------------------------------------------
// Configuration

struct ProblemSpec {
  std::string generator;  // laplacian | toeplitz | random | files
  Index m = 0;
  Index n = 0;
  Index p = 1;
  Index q = 1;
  std::uint64_t seed = 1;
  bool normalize_b = false;
  bool raw_sign = false;
  double mass_perturbation = 0.0;
  std::optional<ProblemPaths> paths;
};

struct ShiftSpec {
  std::string type = "penzl";  // penzl | adaptive | file | list | rksm_poles
  PenzlOptions penzl;
  AdaptiveMode adaptive = AdaptiveMode::plain;
  std::filesystem::path path;
  std::vector<Complex> values;
  Index count = 0;
};

struct RunConfig {
  std::string name = "run";
  ProblemSpec problem;
  std::string solver = "ilrsi";  // ilrsi | rksm | dense_fixed_point | dense_exact
  ShiftSpec shifts;
  double tol = 1e-8;
  Index max_iter = 100;
  double truncation_tol = 0.0;
  Index residual_every = 1;
  bool timing = false;
  std::uint64_t seed = 1;
  std::string history_file = "history.csv";
  std::string summary_file = "summary.json";
  std::optional<std::string> factors_dir;
};

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline Index positive_index(const json& j, const std::string& key, const std::string& where, Index fallback) {
  const auto v = get<long long>(j, key, where, fallback);
  if (v < 1) throw ConfigError(where + "." + key + " must be >= 1");
  return static_cast<Index>(v);
}

}  // namespace detail

inline ProblemSpec parse_problem(const json& j, const std::filesystem::path& base) {
  const std::string where = "problem";
  if (!j.is_object()) throw ConfigError("problem: expected a JSON object");
  ProblemSpec spec;
  spec.generator = detail::get<std::string>(j, "generator", where, "");
  if (spec.generator == "laplacian") {
    detail::reject_unknown(j, where, {"generator", "m"});
    spec.m = detail::positive_index(j, "m", where, 0);
  } else if (spec.generator == "toeplitz") {
    detail::reject_unknown(j, where, {"generator", "n", "normalize_b", "raw_sign"});
    spec.n = detail::positive_index(j, "n", where, 0);
    spec.normalize_b = detail::get<bool>(j, "normalize_b", where, false);
    spec.raw_sign = detail::get<bool>(j, "raw_sign", where, false);
  } else if (spec.generator == "random") {
    detail::reject_unknown(j, where, {"generator", "n", "p", "q", "seed", "mass_perturbation"});
    spec.n = detail::positive_index(j, "n", where, 0);
    spec.p = detail::positive_index(j, "p", where, 1);
    spec.q = detail::positive_index(j, "q", where, 1);
    spec.seed = detail::get<std::uint64_t>(j, "seed", where, 1);
    spec.mass_perturbation = detail::get<double>(j, "mass_perturbation", where, 0.0);
    if (spec.mass_perturbation < 0.0 || spec.mass_perturbation >= 1.0)
      throw ConfigError("problem.mass_perturbation must lie in [0, 1)");
  } else if (spec.generator == "files") {
    detail::reject_unknown(j, where, {"generator", "A", "B", "C", "E"});
    for (const char* key : {"A", "B", "C"})
      if (!j.contains(key)) throw ConfigError(std::string("problem.") + key + " is required");
    ProblemPaths paths{detail::resolve(base, detail::get<std::string>(j, "A", where, "")),
                       detail::resolve(base, detail::get<std::string>(j, "B", where, "")),
                       detail::resolve(base, detail::get<std::string>(j, "C", where, "")), std::nullopt};
    if (j.contains("E")) paths.E = detail::resolve(base, detail::get<std::string>(j, "E", where, ""));
    spec.paths = paths;
  } else {
    throw ConfigError("problem.generator must be one of laplacian, toeplitz, random, files");
  }
  return spec;
}

inline ShiftSpec parse_shifts(const json& j, const std::filesystem::path& base) {
  const std::string where = "shifts";
  if (!j.is_object()) throw ConfigError("shifts: expected a JSON object");
  ShiftSpec spec;
  spec.type = detail::get<std::string>(j, "type", where, "penzl");
  auto parse_mode = [&](const std::string& mode) {
    if (mode == "plain") return AdaptiveMode::plain;
    if (mode == "stabilized") return AdaptiveMode::stabilized;
    throw ConfigError("shifts.mode must be plain or stabilized");
  };
  if (spec.type == "penzl") {
    detail::reject_unknown(j, where, {"type", "m", "m1", "m2", "mode", "candidate_grid"});
    spec.penzl.m = detail::positive_index(j, "m", where, 10);
    spec.penzl.m1 = detail::get<long long>(j, "m1", where, 20);
    spec.penzl.m2 = detail::get<long long>(j, "m2", where, 10);
    spec.penzl.candidate_grid = detail::get<long long>(j, "candidate_grid", where, 0);
    if (spec.penzl.m1 < 0 || spec.penzl.m2 < 0) throw ConfigError("shifts.m1 and shifts.m2 must be >= 0");
    if (spec.penzl.m > spec.penzl.m1 + spec.penzl.m2) throw ConfigError("shifts.m must not exceed m1 + m2");
    const auto mode = detail::get<std::string>(j, "mode", where, "on_A");
    if (mode == "on_A") spec.penzl.mode = PenzlMode::on_A;
    else if (mode == "on_H") spec.penzl.mode = PenzlMode::on_H;
    else throw ConfigError("shifts.mode must be on_A or on_H");
  } else if (spec.type == "adaptive") {
    detail::reject_unknown(j, where, {"type", "mode"});
    spec.adaptive = parse_mode(detail::get<std::string>(j, "mode", where, "plain"));
  } else if (spec.type == "rksm_poles") {
    detail::reject_unknown(j, where, {"type", "mode", "count"});
    spec.adaptive = parse_mode(detail::get<std::string>(j, "mode", where, "plain"));
    spec.count = detail::positive_index(j, "count", where, 100);
  } else if (spec.type == "file") {
    detail::reject_unknown(j, where, {"type", "path"});
    if (!j.contains("path")) throw ConfigError("shifts.path is required");
    spec.path = detail::resolve(base, detail::get<std::string>(j, "path", where, ""));
  } else if (spec.type == "list") {
    detail::reject_unknown(j, where, {"type", "values"});
    if (!j.contains("values")) throw ConfigError("shifts.values is required");
    try {
      spec.values = shifts_from_json(j.at("values")).shifts;
    } catch (const Error& e) {
      throw ConfigError(std::string("shifts.values: ") + e.what());
    }
  } else {
    throw ConfigError("shifts.type must be one of penzl, adaptive, rksm_poles, file, list");
  }
  return spec;
}

inline RunConfig parse_config(const json& j, const std::filesystem::path& base = ".") {
  detail::reject_unknown(j, "config",
                         {"name", "problem", "solver", "shifts", "tol", "max_iter", "truncation_tol",
                          "residual_every", "timing", "seed", "output"});
  RunConfig cfg;
  cfg.name = detail::get<std::string>(j, "name", "config", "run");
  if (!j.contains("problem")) throw ConfigError("problem is required");
  cfg.problem = parse_problem(j.at("problem"), base);
  cfg.solver = detail::get<std::string>(j, "solver", "config", "ilrsi");
  if (cfg.solver != "ilrsi" && cfg.solver != "rksm" && cfg.solver != "dense_fixed_point" &&
      cfg.solver != "dense_exact")
    throw ConfigError("solver must be one of ilrsi, rksm, dense_fixed_point, dense_exact");
  if (j.contains("shifts")) cfg.shifts = parse_shifts(j.at("shifts"), base);
  if (cfg.shifts.type == "adaptive" && cfg.solver != "rksm")
    throw ConfigError("shifts.type adaptive is only available with solver rksm");
  cfg.tol = detail::get<double>(j, "tol", "config", 1e-8);
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  const auto max_iter = detail::get<long long>(j, "max_iter", "config", 100);
  if (max_iter < 0) throw ConfigError("max_iter must be >= 0");
  cfg.max_iter = static_cast<Index>(max_iter);
  cfg.truncation_tol = detail::get<double>(j, "truncation_tol", "config", 0.0);
  if (cfg.truncation_tol < 0.0 || cfg.truncation_tol >= 1.0) throw ConfigError("truncation_tol must lie in [0, 1)");
  cfg.residual_every = detail::positive_index(j, "residual_every", "config", 1);
  cfg.timing = detail::get<bool>(j, "timing", "config", false);
  cfg.seed = detail::get<std::uint64_t>(j, "seed", "config", 1);
  if (j.contains("output")) {
    const json& o = j.at("output");
    detail::reject_unknown(o, "output", {"history", "summary", "factors"});
    cfg.history_file = detail::get<std::string>(o, "history", "output", cfg.history_file);
    cfg.summary_file = detail::get<std::string>(o, "summary", "output", cfg.summary_file);
    if (o.contains("factors")) cfg.factors_dir = detail::get<std::string>(o, "factors", "output", "");
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

inline CareProblem build_problem(const ProblemSpec& spec) {
  if (spec.generator == "laplacian") return make_laplacian_problem(spec.m);
  if (spec.generator == "toeplitz")
    return make_toeplitz_problem(spec.n, {spec.normalize_b, spec.raw_sign});
  if (spec.generator == "random") {
    if (spec.p > spec.n || spec.q > spec.n) throw ConfigError("problem: p and q must not exceed n");
    CareProblem problem = random_stable_problem(spec.n, spec.p, spec.q, spec.seed);
    if (spec.mass_perturbation > 0.0)
      problem = with_random_mass_matrix(std::move(problem), spec.mass_perturbation, spec.seed + 1);
    return problem;
  }
  return load_problem(*spec.paths);
}

// ---------------------------------------------------------------------------
// Running a configuration

struct RunOutcome {
  ConvergenceHistory history;
  ShiftSequence shifts;
  std::vector<std::string> warnings;
  std::optional<LowRankSolution> solution;
};

inline ShiftSequence resolve_shifts(const RunConfig& cfg, const CareProblem& problem, std::vector<std::string>& warnings) {
  const ShiftSpec& s = cfg.shifts;
  ShiftSequence out;
  if (s.type == "penzl") {
    out = penzl_shifts(problem, s.penzl);
  } else if (s.type == "list") {
    out.shifts = s.values;
  } else if (s.type == "file") {
    std::ifstream in(s.path);
    if (!in) throw ConfigError("cannot open shift file '" + s.path.string() + "'");
    try {
      out = shifts_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw ConfigError(s.path.string() + ": " + e.what());
    }
  } else if (s.type == "rksm_poles") {
    PoleStrategy strategy;
    strategy.kind = s.adaptive == AdaptiveMode::plain ? PoleStrategyKind::adaptive_plain
                                                      : PoleStrategyKind::adaptive_stabilized;
    RksmOptions opt;
    opt.tol = std::numeric_limits<double>::min();
    opt.max_iter = s.count;
    const RksmResult r = rksm_solve(problem, strategy, opt);
    out = r.poles;
  }
  warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
  if (out.empty()) throw ConfigError("shift list is empty");
  try {
    validate(out, false);
  } catch (const Error& e) {
    throw ConfigError(std::string("shifts: ") + e.what());
  }
  return out;
}

inline RunOutcome execute(const RunConfig& cfg, const CareProblem& problem) {
  RunOutcome outcome;
  const Stopwatch clock(cfg.timing);
  if (cfg.solver == "dense_exact") {
    const DenseCareSolution sol = dense_care_solve(problem);
    const double rel = dense_residual(problem, sol.X).norm() / problem.constant_term_norm();
    outcome.history.append({1, problem.n(), problem.n(), rel, clock.seconds()});
    outcome.history.finish(rel <= cfg.tol ? SolveStatus::converged : SolveStatus::max_iter);
    return outcome;
  }
  if (cfg.solver == "rksm" && cfg.shifts.type == "adaptive") {
    PoleStrategy strategy;
    strategy.kind = cfg.shifts.adaptive == AdaptiveMode::plain ? PoleStrategyKind::adaptive_plain
                                                               : PoleStrategyKind::adaptive_stabilized;
    const RksmResult r = rksm_solve(problem, strategy, {cfg.tol, cfg.max_iter, cfg.timing});
    outcome.history = r.history;
    outcome.shifts = r.poles;
    outcome.warnings = r.warnings;
    for (std::size_t i = 0; i < r.fallback.size(); ++i)
      if (r.fallback[i]) outcome.warnings.push_back("adaptive pole " + std::to_string(i + 1) + " used the fallback");
    outcome.solution = r.solution;
    return outcome;
  }

  outcome.shifts = resolve_shifts(cfg, problem, outcome.warnings);
  if (cfg.solver == "ilrsi") {
    IlrsiOptions opt;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    opt.truncation_tol = cfg.truncation_tol;
    opt.residual_every = cfg.residual_every;
    opt.timing = cfg.timing;
    IlrsiResult r = ilrsi_solve(problem, outcome.shifts, opt);
    outcome.history = std::move(r.history);
    outcome.solution = std::move(r.solution);
  } else if (cfg.solver == "rksm") {
    PoleStrategy strategy;
    strategy.shifts = outcome.shifts;
    const RksmResult r = rksm_solve(problem, strategy, {cfg.tol, cfg.max_iter, cfg.timing});
    outcome.history = r.history;
    outcome.warnings.insert(outcome.warnings.end(), r.warnings.begin(), r.warnings.end());
    outcome.solution = r.solution;
  } else {  // dense_fixed_point
    const DenseCare care = to_dense(problem);
    const MatrixXc h = hamiltonian(care);
    MatrixXc x = MatrixXc::Zero(care.n(), care.n());
    DenseIterate it;
    SolveStatus status = SolveStatus::max_iter;
    std::string message;
    const double scale = problem.constant_term_norm();
    for (Index k = 0; k < cfg.max_iter; ++k) {
      try {
        cayley_block_update(h, outcome.shifts.cycled(static_cast<std::size_t>(k)), x, k + 1, it);
        x = it.X;
      } catch (const Error& e) {
        status = SolveStatus::breakdown;
        message = e.what();
        break;
      }
      const double rel = dense_residual(problem, x).norm() / scale;
      outcome.history.append({k + 1, (k + 1) * problem.p(), (k + 1) * problem.p(), rel, clock.seconds()});
      if (rel <= cfg.tol) {
        status = SolveStatus::converged;
        break;
      }
    }
    outcome.history.finish(status, message);
  }
  return outcome;
}

inline json summary_json(const RunConfig& cfg, const CareProblem& problem, const RunOutcome& outcome) {
  json j;
  j["name"] = cfg.name;
  j["solver"] = cfg.solver;
  j["status"] = to_string(outcome.history.status());
  j["message"] = outcome.history.message();
  j["problem"] = {{"n", problem.n()}, {"p", problem.p()}, {"q", problem.q()}, {"generalized", problem.generalized()}};
  j["iterations"] = outcome.history.empty() ? 0 : outcome.history.back().iteration;
  j["dimension"] = outcome.history.empty() ? 0 : outcome.history.back().dimension;
  j["rank"] = outcome.history.empty() ? 0 : outcome.history.back().rank;
  j["final_rel_residual"] = outcome.history.empty() ? json(nullptr) : json(outcome.history.back().rel_residual);
  j["tol"] = cfg.tol;
  j["shifts"] = to_json(outcome.shifts);
  j["shift_origin"] = to_string(outcome.shifts.origin);
  j["warnings"] = outcome.warnings;
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  mm::detail::write_atomically(path, text);
}

/// `run`: solve one configuration, write the history CSV and summary JSON.
inline int cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& err = std::cerr) {
  CareProblem problem;
  RunOutcome outcome;
  try {
    problem = build_problem(cfg.problem);
    for (const auto& w : validate(problem).warnings) err << "warning: " << w << '\n';
    outcome = execute(cfg, problem);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const BreakdownError& e) {
    err << "breakdown: " << e.what() << '\n';
    return kBreakdown;
  } catch (const Error& e) {
    err << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::breakdown || e.kind() == ErrorKind::numerical ? kBreakdown : kConfigError;
  }
  for (const auto& w : outcome.warnings) err << "warning: " << w << '\n';
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / cfg.history_file, outcome.history.csv());
  write_text(out_dir / cfg.summary_file, summary_json(cfg, problem, outcome).dump(2) + "\n");
  if (cfg.factors_dir && outcome.solution) export_factors(*outcome.solution, out_dir / *cfg.factors_dir);
  if (outcome.history.status() == SolveStatus::breakdown) err << "breakdown: " << outcome.history.message() << '\n';
  return exit_code(outcome.history.status());
}

inline int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                   std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return cmd_run(cfg, out_dir, err);
}

// ---------------------------------------------------------------------------
// Comparing configurations

struct CompareSeries {
  std::string name;
  ConvergenceHistory history;
  double tol = 0.0;
};

/// Merged CSV: one row per space dimension, one column per series.
inline std::string merged_csv(const std::vector<CompareSeries>& series) {
  std::map<Index, std::vector<std::optional<double>>> rows;
  for (std::size_t s = 0; s < series.size(); ++s)
    for (const auto& r : series[s].history.records()) {
      auto& row = rows[r.dimension];
      row.resize(series.size());
      row[s] = r.rel_residual;
    }
  std::ostringstream out;
  out << "dim";
  for (const auto& s : series) out << ',' << s.name;
  out << '\n' << std::setprecision(17);
  for (auto& [dim, values] : rows) {
    values.resize(series.size());
    out << dim;
    for (const auto& v : values) {
      out << ',';
      if (v) out << *v;
    }
    out << '\n';
  }
  return out.str();
}

inline json compare_verdict(const std::vector<CompareSeries>& series) {
  json j;
  j["series"] = json::array();
  std::optional<Index> best;
  std::vector<std::string> winners;
  for (const auto& s : series) {
    const auto dim = s.history.dimension_reaching(s.tol);
    j["series"].push_back({{"name", s.name},
                           {"status", to_string(s.history.status())},
                           {"dimension_reaching_tol", dim ? json(*dim) : json(nullptr)},
                           {"final_rel_residual",
                            s.history.empty() ? json(nullptr) : json(s.history.back().rel_residual)}});
    if (!dim) continue;
    if (!best || *dim < *best) {
      best = dim;
      winners = {s.name};
    } else if (*dim == *best) {
      winners.push_back(s.name);
    }
  }
  if (winners.empty()) j["verdict"] = "none";
  else if (winners.size() > 1) j["verdict"] = "tie";
  else j["verdict"] = winners.front();
  j["winners"] = winners;
  return j;
}

/// `compare`: run every configuration on the same problem and merge the
/// histories by space dimension.
inline int cmd_compare(const std::vector<std::filesystem::path>& config_paths, const std::filesystem::path& out_dir,
                       std::ostream& err = std::cerr) {
  if (config_paths.size() < 2) {
    err << "config error: compare needs at least two configs\n";
    return kConfigError;
  }
  std::vector<RunConfig> configs;
  std::optional<CareProblem> reference;
  try {
    for (const auto& path : config_paths) {
      configs.push_back(load_config(path));
      CareProblem problem = build_problem(configs.back().problem);
      if (!reference) reference = std::move(problem);
      else if (!(problem == *reference))
        throw ConfigError("'" + path.string() + "' describes a different problem");
    }
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<CompareSeries> series;
  std::set<std::string> names;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string name = configs[i].name;
    while (names.count(name)) name += "_" + std::to_string(i + 1);
    names.insert(name);
    RunOutcome outcome;
    try {
      outcome = execute(configs[i], *reference);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const Error& e) {
      outcome.history.finish(SolveStatus::breakdown, e.what());
    }
    for (const auto& w : outcome.warnings) err << "warning (" << name << "): " << w << '\n';
    series.push_back({name, outcome.history, configs[i].tol});
  }
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "compare.csv", merged_csv(series));
  write_text(out_dir / "compare.json", compare_verdict(series).dump(2) + "\n");
  return kConverged;
}

// ---------------------------------------------------------------------------
// Verification suites

struct CheckResult {
  std::string name;
  std::string instance;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Test hook: "corrupt_T" perturbs the representation matrix before the
  /// identity checks.
  std::string fault;
};

class CheckLog {
 public:
  void record(std::string name, std::string instance, double value, double threshold) {
    checks_.push_back({std::move(name), std::move(instance), value, threshold, value <= threshold});
  }
  void require(std::string name, std::string instance, bool ok) {
    checks_.push_back({std::move(name), std::move(instance), ok ? 0.0 : 1.0, 0.0, ok});
  }
  const std::vector<CheckResult>& checks() const { return checks_; }
  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.pass; });
  }

 private:
  std::vector<CheckResult> checks_;
};

namespace detail {

inline std::vector<Complex> random_shifts(std::mt19937_64& rng, Index k, bool complex_pairs) {
  std::vector<Complex> out;
  while (static_cast<Index>(out.size()) < k) {
    const double re = riccati_si::detail::uniform(rng, 0.2, 8.0);
    if (complex_pairs && static_cast<Index>(out.size()) + 2 <= k && riccati_si::detail::unit_uniform(rng) < 0.3) {
      const double im = riccati_si::detail::uniform(rng, 0.2, 4.0);
      out.emplace_back(re, im);
      out.emplace_back(re, -im);
    } else {
      out.emplace_back(re, 0.0);
    }
  }
  return out;
}

/// Real shifts 0.25·3^i with ±25% jitter.
inline std::vector<Complex> spread_shifts(std::mt19937_64& rng, Index k) {
  std::vector<Complex> out;
  for (Index i = 0; i < k; ++i)
    out.emplace_back(0.25 * std::pow(3.0, static_cast<double>(i)) * riccati_si::detail::uniform(rng, 0.8, 1.25), 0.0);
  return out;
}

inline double rel_diff(const MatrixXc& x, const MatrixXc& y) {
  const double scale = std::max(x.norm(), y.norm());
  return scale > 0.0 ? (x - y).norm() / scale : 0.0;
}

}  // namespace detail

inline void suite_identities(CheckLog& log, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  for (int inst = 0; inst < 5; ++inst) {
    const Index n = 20 + 5 * inst, k = 4 + inst;
    const std::string tag = "n=" + std::to_string(n) + ",k=" + std::to_string(k);
    const CareProblem problem = random_stable_problem(n, 1, 1, rng());
    const auto shifts = detail::spread_shifts(rng, k);

    DistinctShiftBasisData data = build_distinct_basis(problem, shifts);
    if (opt.fault == "corrupt_T") data.T(0, data.T.cols() - 1) += 1e-3 * data.T.norm();
    log.record("check_sylvester_identity", tag, check_sylvester_identity(data), 1e-10 * data.T.norm());
    log.record("check_entrywise_T", tag, check_entrywise_T(data), 1e-10);

    const DenseCare care = to_dense(problem);
    const SchurIdentityDefects sd = schur_identity_defects(care, shifts[0]);
    log.record("schur_complement_identity_1", tag, sd.first, 1e-12);
    log.record("schur_complement_identity_2", tag, sd.second, 1e-12);
    log.record("block_inverse_formula", tag, sd.block_inverse, 1e-12);
    const auto symp = symplectic_defects(care, Complex(shifts[0].real(), 0.5));
    log.record("symplectic_relations", tag, *std::max_element(symp.begin(), symp.end()), 1e-10);
    const MatrixXc h = hamiltonian(care);
    log.record("cayley_two_forms", tag,
               detail::rel_diff(cayley(h, shifts[0]), cayley_resolvent_form(h, shifts[0])), 1e-12);

    const ResidualRankDiagnostic rr = residual_rank_diagnostic(problem, data);
    log.record("residual_rank_one", tag, rr.sigma2 / std::max(rr.sigma1, 1e-300), 1e-10);
    log.record("residual_factored_form", tag, rr.factored_defect, 1e-10);

    IlrsiState state = ilrsi_init(problem, shifts[0]);
    MatrixXc prev = state.solution().dense();
    double worst_herm = hermitian_drift(prev), worst_mono = 0.0, worst_rank = 0.0;
    for (Index i = 1; i < k; ++i) {
      ilrsi_step(state, shifts[static_cast<std::size_t>(i)]);
      const MatrixXc x = state.solution().dense();
      worst_herm = std::max(worst_herm, hermitian_drift(x));
      const MatrixXc diff = hermitian_part(x - prev);
      Eigen::SelfAdjointEigenSolver<MatrixXc> es(diff, Eigen::EigenvaluesOnly);
      worst_mono = std::max(worst_mono, -es.eigenvalues()(0) / x.norm());
      Eigen::JacobiSVD<MatrixXc> svd(diff);
      worst_rank = std::max(worst_rank, svd.singularValues()(1) / svd.singularValues()(0));
      prev = x;
    }
    log.record("hermitian_iterates", tag, worst_herm, 1e-10);
    log.record("monotone_updates", tag, worst_mono, 1e-10);
    log.record("rank_one_updates", tag, worst_rank, 1e-10);
  }
}

inline void suite_oracle(CheckLog& log, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed + 1000);
  for (int inst = 0; inst < 5; ++inst) {
    const Index n = 10 + 6 * inst, k = 6;
    const std::string tag = "n=" + std::to_string(n);
    const CareProblem problem = random_stable_problem(n, 1, 1, rng());
    const auto shifts = detail::random_shifts(rng, k, true);
    const DenseCare care = to_dense(problem);
    const DenseTrajectory traj = dense_subspace_iteration(care, shifts, MatrixXc::Zero(n, n), k);
    log.record("dense_forms_agree", tag, traj.max_disagreement, 1e-10);

    IlrsiState state = ilrsi_init(problem, shifts[0]);
    LrsiFactors lrsi;
    lrsi.U.resize(n, 0);
    ShiftedSolver solver(problem);
    double worst_dense = 0.0, worst_lrsi = 0.0, worst_res = 0.0;
    for (Index i = 0; i < k; ++i) {
      if (i > 0) ilrsi_step(state, shifts[static_cast<std::size_t>(i)]);
      lrsi = lrsi_reference_step(lrsi, problem, solver, shifts[static_cast<std::size_t>(i)]);
      const MatrixXc x = state.solution().dense();
      worst_dense = std::max(worst_dense, detail::rel_diff(x, traj.block_form[static_cast<std::size_t>(i)].X));
      worst_lrsi = std::max(worst_lrsi, detail::rel_diff(x, lrsi.U * lrsi.T.partialPivLu().solve(lrsi.U.adjoint())));
      const double dense_norm = dense_residual(problem, x).norm();
      worst_res = std::max(worst_res, std::abs(state.residual_norm() - dense_norm) / dense_norm);
    }
    log.record("ilrsi_vs_dense_iteration", tag, worst_dense, 1e-8);
    log.record("ilrsi_vs_lrsi", tag, worst_lrsi, 1e-9);
    log.record("residual_norm_vs_dense", tag, worst_res, 1e-10);

    const DenseCareSolution exact = dense_care_solve(care);
    log.record("dense_care_residual", tag, exact.rel_residual, 1e-10);
    log.require("dense_care_stabilizing", tag, exact.closed_loop_abscissa < 0.0);

    CareProblem lyap = problem;
    lyap.B.setZero();
    const DenseCare lcare = to_dense(lyap);
    const auto adi = dense_adi_lyapunov(lcare.A, lcare.G, shifts, MatrixXc::Zero(n, n), k);
    IlrsiState ls = ilrsi_init(lyap, shifts[0]);
    double worst_adi = detail::rel_diff(ls.solution().dense(), adi[0]);
    for (Index i = 1; i < k; ++i) {
      ilrsi_step(ls, shifts[static_cast<std::size_t>(i)]);
      worst_adi = std::max(worst_adi, detail::rel_diff(ls.solution().dense(), adi[static_cast<std::size_t>(i)]));
    }
    log.record("lyapunov_adi_agreement", tag, worst_adi, 1e-10);
  }
}

inline void suite_bound(CheckLog& log, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed + 2000);
  for (int inst = 0; inst < 5; ++inst) {
    const Index n = 4 + inst, k = 6;
    const std::string tag = "n=" + std::to_string(n);
    const CareProblem problem = random_stable_problem(n, 1, 1, rng());
    const auto shifts = detail::random_shifts(rng, 3, false);
    const DenseCare care = to_dense(problem);
    const HamiltonianAnalysis an = analyze_hamiltonian(care, shifts, MatrixXc::Zero(n, n));
    log.record("initial_distance_below_one", tag, an.d, 1.0 - 1e-12);
    log.record("distance_formula_agreement", tag, std::abs(an.d - an.d_projector), 1e-8);
    const DenseTrajectory traj = dense_subspace_iteration(care, shifts, MatrixXc::Zero(n, n), k);
    double worst = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < k; ++i) {
      const BoundCheck b = convergence_bound(an, traj.block_form[static_cast<std::size_t>(i)].X, i + 1);
      worst = std::max(worst, b.distance - b.bound);
    }
    log.record("distance_below_bound", tag, worst, 1e-10);
    log.record("spectral_radius_identity", tag, spectral_radius_identity_check(an), 1e-8);
    log.record("hamiltonian_eigenvalue_symmetry", tag, hamiltonian_symmetry_defect(an), 1e-10);
    log.record("sylvester_coupling", tag,
               (an.T11 * an.K - an.K * an.T22 + an.T12).norm() / std::max(an.T12.norm(), 1e-300), 1e-10);
  }
}

inline json report_json(const std::string& suite, const CheckLog& log) {
  json j;
  j["suite"] = suite;
  j["pass"] = log.all_pass();
  j["checks"] = json::array();
  j["failed"] = json::array();
  for (const auto& c : log.checks()) {
    j["checks"].push_back({{"name", c.name}, {"instance", c.instance}, {"value", c.value},
                           {"threshold", c.threshold}, {"pass", c.pass}});
    if (!c.pass) j["failed"].push_back(c.name);
  }
  return j;
}

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"identities", "oracle", "bound"};
  return names;
}

/// `verify`: runs a named suite; the JSON report goes to `report` (stdout
/// when empty).
inline int cmd_verify(const std::string& suite, const VerifyOptions& opt, const std::filesystem::path& report,
                      std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CheckLog log;
  if (!opt.fault.empty() && opt.fault != "corrupt_T") {
    err << "config error: unknown fault '" << opt.fault << "'\n";
    return kConfigError;
  }
  try {
    if (suite == "identities") suite_identities(log, opt);
    else if (suite == "oracle") suite_oracle(log, opt);
    else if (suite == "bound") suite_bound(log, opt);
    else {
      err << "config error: unknown suite '" << suite << "' (expected identities, oracle or bound)\n";
      return kConfigError;
    }
  } catch (const Error& e) {
    log.require("suite_completed", e.what(), false);
  }
  const std::string text = report_json(suite, log).dump(2) + "\n";
  if (report.empty()) out << text;
  else write_text(report, text);
  for (const auto& c : log.checks())
    if (!c.pass) err << "FAILED " << c.name << " [" << c.instance << "]: " << c.value << " > " << c.threshold << '\n';
  return log.all_pass() ? kConverged : kVerifyFailed;
}

}  // namespace riccati_si::cli
