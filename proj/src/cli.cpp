#include "hypo/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include <CLI11.hpp>

#include "hypo/builtins.hpp"
#include "hypo/validate.hpp"

namespace hypo {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// ---- strict JSON access ----

std::string field(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

void check_object(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("field '" + (ctx.empty() ? std::string("<root>") : ctx) + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!ok.count(k)) {
      std::string list;
      for (const auto& a : ok) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key '" + field(ctx, k) + "' (allowed: " + list + ")");
    }
  }
}

template <class T>
T as(const json& v, const std::string& name) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("field '" + name + "' has the wrong type");
  }
}

template <class T>
T required(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key)) throw ConfigError("missing required field '" + field(ctx, key) + "'");
  return as<T>(j.at(key), field(ctx, key));
}

template <class T>
T optional_or(const json& j, const std::string& ctx, const char* key, T def) {
  return j.contains(key) ? as<T>(j.at(key), field(ctx, key)) : def;
}

std::vector<double> number_list(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError("field '" + name + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as<double>(e, name));
  return out;
}

std::vector<double> required_list(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key)) throw ConfigError("missing required field '" + field(ctx, key) + "'");
  return number_list(j.at(key), field(ctx, key));
}

ObservationDesign parse_design(const json& j, const std::string& ctx) {
  check_object(j, ctx, {"delta", "t_horizon", "fine_delta", "burn_in", "initial_state"});
  ObservationDesign d;
  d.delta = required<double>(j, ctx, "delta");
  d.t_horizon = required<double>(j, ctx, "t_horizon");
  d.fine_delta = optional_or<double>(j, ctx, "fine_delta", 1e-4);
  d.burn_in = optional_or<double>(j, ctx, "burn_in", 10.0);
  if (j.contains("initial_state")) d.initial_state = number_list(j.at("initial_state"), field(ctx, "initial_state"));
  d.validate();
  return d;
}

Box parse_box(const json& j, const std::string& ctx) {
  check_object(j, ctx, {"lo", "hi"});
  Box b{required_list(j, ctx, "lo"), required_list(j, ctx, "hi")};
  if (b.lo.size() != b.hi.size()) throw ConfigError("field '" + ctx + "': lo and hi differ in length");
  for (std::size_t k = 0; k < b.lo.size(); ++k)
    if (!(b.lo[k] < b.hi[k])) throw ConfigError("field '" + ctx + "': lo must be below hi in every coordinate");
  return b;
}

OptimizerConfig parse_optimizer(const json& j, const std::string& ctx) {
  OptimizerConfig o;
  if (!j.is_object()) throw ConfigError("field '" + ctx + "' must be an object");
  const auto method = required<std::string>(j, ctx, "method");
  if (method == "adam") {
    check_object(j, ctx,
                 {"method", "step", "beta1", "beta2", "eps", "iters", "record_trace", "keep_best", "early_stop_tol",
                  "early_stop_window"});
    auto& a = o.adam;
    a.step = optional_or<double>(j, ctx, "step", a.step);
    a.beta1 = optional_or<double>(j, ctx, "beta1", a.beta1);
    a.beta2 = optional_or<double>(j, ctx, "beta2", a.beta2);
    a.eps = optional_or<double>(j, ctx, "eps", a.eps);
    a.iters = optional_or<int>(j, ctx, "iters", a.iters);
    a.record_trace = optional_or<bool>(j, ctx, "record_trace", a.record_trace);
    a.keep_best = optional_or<bool>(j, ctx, "keep_best", a.keep_best);
    a.early_stop_tol = optional_or<double>(j, ctx, "early_stop_tol", a.early_stop_tol);
    a.early_stop_window = optional_or<int>(j, ctx, "early_stop_window", a.early_stop_window);
    a.validate();
  } else if (method == "nelder_mead") {
    check_object(j, ctx, {"method", "tol", "max_evals", "record_trace"});
    o.method = OptimizerConfig::Method::kNelderMead;
    auto& n = o.nelder_mead;
    n.tol = optional_or<double>(j, ctx, "tol", n.tol);
    n.max_evals = optional_or<int>(j, ctx, "max_evals", n.max_evals);
    n.record_trace = optional_or<bool>(j, ctx, "record_trace", n.record_trace);
    if (!(n.tol > 0.0) || n.max_evals < 1) throw ConfigError("field '" + ctx + "': tol and max_evals must be positive");
  } else {
    throw ConfigError("field '" + field(ctx, "method") + "' must be \"adam\" or \"nelder_mead\"");
  }
  return o;
}

ObservationMode parse_mode(const json& j) {
  const auto m = optional_or<std::string>(j, "", "mode", "complete");
  if (m == "complete") return ObservationMode::kComplete;
  if (m == "partial-fhn") return ObservationMode::kPartialFhn;
  throw ConfigError("field 'mode' must be \"complete\" or \"partial-fhn\"");
}

KalmanPrior parse_prior(const json& j) {
  KalmanPrior pr;
  if (!j.contains("prior")) return pr;
  const auto& v = j.at("prior");
  check_object(v, "prior", {"m0", "q0"});
  pr.m0 = optional_or<double>(v, "prior", "m0", pr.m0);
  pr.q0 = optional_or<double>(v, "prior", "q0", pr.q0);
  if (!(pr.q0 >= 0.0)) throw ConfigError("field 'prior.q0' must be non-negative");
  return pr;
}

void check_model_id(const std::string& id) { (void)make_builtin(id); }

template <class F>
decltype(auto) with_model(const std::string& id, F&& f) {
  return std::visit(std::forward<F>(f), make_builtin(id));
}

template <HypoModel M>
std::vector<std::string> param_names() {
  std::vector<std::string> out;
  for (const auto& p : M::params()) out.emplace_back(p.name);
  return out;
}

template <HypoModel M>
Vec<double, M::kP> theta_for(const M& m, const std::vector<double>& v, const char* what) {
  if (static_cast<int>(v.size()) != M::kP) {
    std::string names;
    for (const auto& n : param_names<M>()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError(std::string(what) + " has " + std::to_string(v.size()) + " entries; " + m.id() + " expects " +
                      std::to_string(M::kP) + " (" + names + ")");
  }
  return Vec<double, M::kP>(v.data());
}

template <HypoModel M>
Box resolve_box(const std::optional<Box>& b) {
  if (!b) return default_box(M::params());
  if (static_cast<int>(b->size()) != M::kP) throw ConfigError("theta_box has the wrong dimension");
  return *b;
}

void check_orders(const std::string& id, const std::vector<int>& ps, ObservationMode mode) {
  const int maxp = with_model(id, [](const auto& m) { return std::decay_t<decltype(m)>::kMaxP; });
  for (int p : ps) {
    if (mode == ObservationMode::kPartialFhn) {
      if (p != 2 && p != 3) throw ConfigError("partial-fhn mode supports p in {2, 3}, got " + std::to_string(p));
    } else if (p < 2 || p > maxp) {
      throw ConfigError("p=" + std::to_string(p) + " unsupported for " + id + " (supports 2.." + std::to_string(maxp) +
                        ")");
    }
  }
}

void check_mode(const std::string& id, ObservationMode mode, const OptimizerConfig& o) {
  if (mode != ObservationMode::kPartialFhn) return;
  if (id != "fhn") throw ConfigError("mode partial-fhn requires model_id \"fhn\"");
  if (o.method != OptimizerConfig::Method::kNelderMead)
    throw ConfigError("mode partial-fhn needs optimizer.method \"nelder_mead\" (no gradient is available)");
}

// ---- output helpers ----

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
  if (!f) throw Error("write failed: " + p.string());
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson trace_json(const std::vector<TraceEntry>& tr) {
  ojson out = ojson::array();
  for (const auto& e : tr) out.push_back({{"iter", e.iter}, {"value", e.value}, {"theta", e.theta}});
  return out;
}

// ---- estimation core ----

template <HypoModel M>
EstimationResult estimate_one(const M& m, const ObservationSet& obs, int p, ObservationMode mode,
                              const OptimizerConfig& o, const std::vector<double>& theta0, const Box& box,
                              const KalmanPrior& prior, int workers) {
  if (obs.states.cols() != M::kN)
    throw DimensionError("data has " + std::to_string(obs.states.cols()) + " state columns; " + m.id() + " has " +
                         std::to_string(M::kN));
  if (!box.contains(theta0)) throw ConfigError("theta0 lies outside the parameter box");
  if (mode == ObservationMode::kPartialFhn) {
    if constexpr (std::is_same_v<M, Fhn>) {
      std::vector<double> xs(obs.states.rows());
      for (Eigen::Index i = 0; i < obs.states.rows(); ++i) xs[i] = obs.states(i, 0);
      const double dt = obs.design.delta;
      auto f = [&](const std::vector<double>& th) {
        try {
          return marginal_loglik(xs, Vec<double, 4>(th.data()), dt, p, prior, m.s);
        } catch (const Error&) {
          return std::numeric_limits<double>::quiet_NaN();
        }
      };
      if (!std::isfinite(f(theta0)))
        throw NotPositiveDefinite("marginal likelihood undefined at theta0 (degenerate predictive variance)",
                                  std::numeric_limits<double>::quiet_NaN());
      return nelder_mead_maximize(f, theta0, box, o.nelder_mead);
    } else {
      throw ConfigError("mode partial-fhn requires model_id \"fhn\"");
    }
  }
  const ContrastConfig cfg{p};
  if (o.method == OptimizerConfig::Method::kAdam) return estimate_contrast(m, cfg, obs, theta0, o.adam, box, workers);
  const ContrastOptions copt{workers, false};
  auto f = [&](const std::vector<double>& th) {
    const auto v = contrast_value(m, cfg, obs, Vec<double, M::kP>(th.data()), copt);
    return v.ok ? -v.value : std::numeric_limits<double>::quiet_NaN();
  };
  if (!std::isfinite(f(theta0)))
    throw NotPositiveDefinite("contrast undefined at theta0 (covariance not positive definite)",
                              std::numeric_limits<double>::quiet_NaN());
  return nelder_mead_maximize(f, theta0, box, o.nelder_mead);
}

// ---- subcommands ----

struct CliContext {
  json config;
  std::string config_text;
  std::filesystem::path out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

ojson provenance(const CliContext& c, std::uint64_t seed) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(c.config.dump())));
  return {{"config_hash", hash}, {"seed", seed}, {"version", kVersion}};
}

int cmd_simulate(const CliContext& c) {
  auto cfg = parse_simulate_config(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  std::filesystem::create_directories(c.out);
  with_model(cfg.model_id, [&](const auto& m) {
    using M = std::decay_t<decltype(m)>;
    const auto th = theta_for(m, cfg.true_theta, "true_theta");
    for (int r = 0; r < cfg.replications; ++r) {
      auto d = cfg.design;
      d.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
      const auto obs = simulate_observations<M>(m, th, d);
      const auto stem = c.out / ("sim_" + std::to_string(d.seed));
      write_observations_csv(obs, stem.string() + ".csv");
      write_observations_sidecar(obs, stem.string() + ".json");
      std::cout << stem.string() << ".csv (" << obs.n() + 1 << " rows)\n";
    }
  });
  return 0;
}

int cmd_estimate(const CliContext& c) {
  const auto cfg = parse_estimate_config(c.config);
  const auto obs = read_observations(cfg.data);
  std::filesystem::create_directories(c.out);
  ojson out;
  with_model(cfg.model_id, [&](const auto& m) {
    using M = std::decay_t<decltype(m)>;
    const Box box = resolve_box<M>(cfg.box);
    const auto theta0 = cfg.theta0 ? *cfg.theta0 : box.midpoint();
    (void)theta_for(m, theta0, "theta0");
    if (!box.contains(theta0)) throw ConfigError("theta0 lies outside the parameter box");
    const auto res = estimate_one(m, obs, cfg.p, cfg.mode, cfg.optimizer, theta0, box, cfg.prior, cfg.workers);
    out["model_id"] = m.id();
    out["p"] = cfg.p;
    out["mode"] = cfg.mode == ObservationMode::kComplete ? "complete" : "partial-fhn";
    out["names"] = param_names<M>();
    out["theta_hat"] = res.theta_hat;
    out["theta0"] = theta0;
    out["box"] = {{"lo", box.lo}, {"hi", box.hi}};
    out["objective"] = res.value;
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    out["evaluations"] = res.evaluations;
    out["retreats"] = res.retreats;
    out["runtime_seconds"] = res.runtime;
    out["optimizer"] = to_json(cfg.optimizer);
    if (cfg.mode == ObservationMode::kPartialFhn) out["prior"] = {{"m0", cfg.prior.m0}, {"q0", cfg.prior.q0}};
    if (cfg.standard_errors && cfg.mode == ObservationMode::kComplete) {
      const auto pm = asymptotic_precision(m, ContrastConfig{cfg.p}, obs, Vec<double, M::kP>(res.theta_hat.data()));
      const VectorXd se = pm.standard_errors();
      out["standard_errors"] = std::vector<double>(se.data(), se.data() + se.size());
    }
    if (!res.trace.empty()) out["trace"] = trace_json(res.trace);
    out["data"] = cfg.data;
    out["n"] = obs.n();
    out["delta"] = obs.design.delta;
    out["provenance"] = provenance(c, obs.design.seed);
  });
  write_file(c.out / "estimate.json", out.dump(2) + "\n");
  std::cout << (c.out / "estimate.json").string() << '\n';
  return 0;
}

int cmd_experiment(const CliContext& c) {
  auto cfg = parse_experiment_config(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  std::filesystem::create_directories(c.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_experiment(cfg, c.jobs);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(c.out / "report.csv", report_csv(rep));
  write_file(c.out / "summary.csv", summary_csv(rep));
  ojson side;
  side["timestamp"] = utc_timestamp();
  side["provenance"] = provenance(c, cfg.base_seed);
  side["config"] = c.config;
  side["theta0"] = rep.theta0;
  side["jobs"] = c.jobs;
  side["wall_seconds"] = wall;
  ojson rt = ojson::array();
  for (const auto& r : rep.rows) rt.push_back({{"replication", r.replication}, {"p", r.p}, {"seconds", r.runtime}});
  side["runtimes"] = rt;
  write_file(c.out / "report.json", side.dump(2) + "\n");
  std::cout << summary_csv(rep);
  return 0;
}

int cmd_validate(const CliContext& c) {
  auto cfg = parse_validate_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  ojson out;
  bool pass = true;
  with_model(cfg.model_id, [&](const auto& m) {
    using M = std::decay_t<decltype(m)>;
    const auto tv = cfg.theta ? *cfg.theta : m.default_theta();
    ValidationOptions opt;
    opt.points = cfg.points;
    opt.seed = cfg.seed;
    const auto rep = validate_model(m, theta_for(m, tv, "theta"), opt);
    pass = rep.pass();
    out["model_id"] = rep.model_id;
    out["names"] = param_names<M>();
    out["theta"] = rep.theta;
    out["points"] = cfg.points;
    out["seed"] = cfg.seed;
    out["pass"] = pass;
    ojson checks = ojson::array();
    for (const auto& ch : rep.checks) {
      checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"value", ch.value}, {"threshold", ch.threshold}});
      if (!ch.note.empty()) checks.back()["note"] = ch.note;
      std::printf("%s %-32s %.6g (threshold %.3g)\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.value,
                  ch.threshold);
    }
    out["checks"] = checks;
    out["provenance"] = provenance(c, cfg.seed);
  });
  std::filesystem::create_directories(c.out);
  write_file(c.out / "validate.json", out.dump(2) + "\n");
  std::printf("%s\n", pass ? "all checks passed" : "some checks failed");
  return 0;
}

int cmd_precision(const CliContext& c) {
  auto cfg = parse_precision_config(c.config);
  if (c.seed) cfg.design.seed = *c.seed;
  ojson out;
  with_model(cfg.model_id, [&](const auto& m) {
    using M = std::decay_t<decltype(m)>;
    const auto th = theta_for(m, cfg.theta, "theta");
    const ObservationSet obs = cfg.data ? read_observations(*cfg.data) : simulate_observations<M>(m, th, cfg.design);
    const auto pm = asymptotic_precision(m, ContrastConfig{cfg.p}, obs, th);
    const VectorXd se = pm.standard_errors();
    out["model_id"] = m.id();
    out["names"] = param_names<M>();
    out["theta"] = cfg.theta;
    ojson g = ojson::array();
    for (Eigen::Index i = 0; i < pm.gamma.rows(); ++i) {
      std::vector<double> row(pm.gamma.cols());
      for (Eigen::Index k = 0; k < pm.gamma.cols(); ++k) row[k] = pm.gamma(i, k);
      g.push_back(row);
    }
    out["gamma"] = g;
    out["rate"] = std::vector<double>(pm.rate.data(), pm.rate.data() + pm.rate.size());
    out["standard_errors"] = std::vector<double>(se.data(), se.data() + se.size());
    out["samples"] = pm.samples;
    out["delta"] = obs.design.delta;
    out["provenance"] = provenance(c, obs.design.seed);
  });
  std::filesystem::create_directories(c.out);
  write_file(c.out / "precision.json", out.dump(2) + "\n");
  std::cout << (c.out / "precision.json").string() << '\n';
  return 0;
}

}  // namespace

// ---- parsers ----

SimulateConfig parse_simulate_config(const json& j) {
  check_object(j, "", {"model_id", "true_theta", "design", "replications", "base_seed"});
  SimulateConfig c;
  c.model_id = required<std::string>(j, "", "model_id");
  check_model_id(c.model_id);
  c.true_theta = required_list(j, "", "true_theta");
  if (!j.contains("design")) throw ConfigError("missing required field 'design'");
  c.design = parse_design(j.at("design"), "design");
  c.replications = optional_or<int>(j, "", "replications", 1);
  c.base_seed = optional_or<std::uint64_t>(j, "", "base_seed", 0);
  if (c.replications < 1) throw ConfigError("field 'replications' must be at least 1");
  return c;
}

EstimateConfig parse_estimate_config(const json& j) {
  check_object(j, "", {"model_id", "data", "p", "mode", "theta0", "theta_box", "optimizer", "prior", "standard_errors",
                       "workers"});
  EstimateConfig c;
  c.model_id = required<std::string>(j, "", "model_id");
  check_model_id(c.model_id);
  c.data = required<std::string>(j, "", "data");
  c.p = required<int>(j, "", "p");
  c.mode = parse_mode(j);
  if (j.contains("theta0")) c.theta0 = number_list(j.at("theta0"), "theta0");
  if (j.contains("theta_box")) c.box = parse_box(j.at("theta_box"), "theta_box");
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer"), "optimizer");
  c.prior = parse_prior(j);
  c.standard_errors = optional_or<bool>(j, "", "standard_errors", false);
  c.workers = optional_or<int>(j, "", "workers", 1);
  if (c.workers < 1) throw ConfigError("field 'workers' must be at least 1");
  check_orders(c.model_id, {c.p}, c.mode);
  check_mode(c.model_id, c.mode, c.optimizer);
  return c;
}

ExperimentConfig parse_experiment_config(const json& j) {
  check_object(j, "", {"model_id", "true_theta", "theta_box", "design", "p_list", "replications", "base_seed",
                       "optimizer", "mode", "theta0", "prior"});
  ExperimentConfig c;
  c.model_id = required<std::string>(j, "", "model_id");
  check_model_id(c.model_id);
  c.true_theta = required_list(j, "", "true_theta");
  if (j.contains("theta_box")) c.box = parse_box(j.at("theta_box"), "theta_box");
  if (!j.contains("design")) throw ConfigError("missing required field 'design'");
  c.design = parse_design(j.at("design"), "design");
  if (!j.contains("p_list")) throw ConfigError("missing required field 'p_list'");
  if (!j.at("p_list").is_array() || j.at("p_list").empty())
    throw ConfigError("field 'p_list' must be a non-empty array of integers");
  for (const auto& v : j.at("p_list")) c.p_list.push_back(as<int>(v, "p_list"));
  c.replications = required<int>(j, "", "replications");
  if (c.replications < 1) throw ConfigError("field 'replications' must be at least 1");
  c.base_seed = optional_or<std::uint64_t>(j, "", "base_seed", 0);
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer"), "optimizer");
  c.mode = parse_mode(j);
  if (j.contains("theta0")) c.theta0 = number_list(j.at("theta0"), "theta0");
  c.prior = parse_prior(j);
  check_orders(c.model_id, c.p_list, c.mode);
  check_mode(c.model_id, c.mode, c.optimizer);
  return c;
}

ValidateConfig parse_validate_config(const json& j) {
  check_object(j, "", {"model_id", "theta", "points", "seed"});
  ValidateConfig c;
  c.model_id = required<std::string>(j, "", "model_id");
  check_model_id(c.model_id);
  if (j.contains("theta")) c.theta = number_list(j.at("theta"), "theta");
  c.points = optional_or<int>(j, "", "points", 100);
  c.seed = optional_or<std::uint64_t>(j, "", "seed", 1);
  if (c.points < 1) throw ConfigError("field 'points' must be at least 1");
  return c;
}

PrecisionConfig parse_precision_config(const json& j) {
  check_object(j, "", {"model_id", "theta", "p", "data", "design", "seed"});
  PrecisionConfig c;
  c.model_id = required<std::string>(j, "", "model_id");
  check_model_id(c.model_id);
  c.theta = required_list(j, "", "theta");
  c.p = optional_or<int>(j, "", "p", 2);
  check_orders(c.model_id, {c.p}, ObservationMode::kComplete);
  if (j.contains("data")) c.data = as<std::string>(j.at("data"), "data");
  if (j.contains("design")) {
    c.design = parse_design(j.at("design"), "design");
  } else if (!c.data) {
    throw ConfigError("missing required field 'design' (or 'data')");
  }
  c.design.seed = optional_or<std::uint64_t>(j, "", "seed", 0);
  return c;
}

ojson to_json(const OptimizerConfig& o) {
  if (o.method == OptimizerConfig::Method::kNelderMead)
    return {{"method", "nelder_mead"}, {"tol", o.nelder_mead.tol}, {"max_evals", o.nelder_mead.max_evals}};
  const auto& a = o.adam;
  return {{"method", "adam"},         {"step", a.step},
          {"beta1", a.beta1},         {"beta2", a.beta2},
          {"eps", a.eps},             {"iters", a.iters},
          {"keep_best", a.keep_best}, {"early_stop_tol", a.early_stop_tol},
          {"early_stop_window", a.early_stop_window}};
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---- experiment ----

ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  check_orders(cfg.model_id, cfg.p_list, cfg.mode);
  check_mode(cfg.model_id, cfg.mode, cfg.optimizer);
  return with_model(cfg.model_id, [&](const auto& m) {
    using M = std::decay_t<decltype(m)>;
    ExperimentReport rep;
    rep.model_id = m.id();
    rep.names = param_names<M>();
    const auto th = theta_for(m, cfg.true_theta, "true_theta");
    rep.true_theta = cfg.true_theta;
    const Box box = resolve_box<M>(cfg.box);
    rep.theta0 = cfg.theta0 ? *cfg.theta0 : box.midpoint();
    (void)theta_for(m, rep.theta0, "theta0");
    if (!box.contains(rep.theta0)) throw ConfigError("theta0 lies outside the parameter box");
    cfg.design.validate();

    const int np = static_cast<int>(cfg.p_list.size());
    rep.rows.resize(static_cast<std::size_t>(cfg.replications) * np);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r = next++; r < cfg.replications; r = next++) {
        auto d = cfg.design;
        d.seed = cfg.base_seed + static_cast<std::uint64_t>(r);
        std::optional<ObservationSet> obs;
        std::string sim_error;
        try {
          obs = simulate_observations<M>(m, th, d);
        } catch (const std::exception& e) {
          sim_error = e.what();
        }
        for (int k = 0; k < np; ++k) {
          auto& row = rep.rows[static_cast<std::size_t>(r) * np + k];
          row.replication = r;
          row.seed = d.seed;
          row.p = cfg.p_list[k];
          if (!obs) {
            row.status = "simulation_failed";
            row.message = sim_error;
            continue;
          }
          const auto t0 = std::chrono::steady_clock::now();
          try {
            const auto res = estimate_one(m, *obs, row.p, cfg.mode, cfg.optimizer, rep.theta0, box, cfg.prior, 1);
            row.status = "ok";
            row.theta_hat = res.theta_hat;
            row.error.resize(M::kP);
            for (int i = 0; i < M::kP; ++i) row.error[i] = res.theta_hat[i] - cfg.true_theta[i];
            row.objective = res.value;
            row.converged = res.converged;
            row.iterations = res.iterations;
          } catch (const std::exception& e) {
            row.status = "estimation_failed";
            row.message = e.what();
          }
          row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
      }
    };
    const int nt = std::max(1, std::min(jobs, cfg.replications));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    rep.summary = summarize(rep.rows, cfg.p_list, M::kP);
    return rep;
  });
}

std::vector<SummaryRow> summarize(const std::vector<ReplicationRow>& rows, const std::vector<int>& p_list,
                                  std::size_t dim) {
  std::vector<SummaryRow> out;
  for (int p : p_list) {
    SummaryRow s;
    s.p = p;
    s.mean.assign(dim, 0.0);
    s.sd.assign(dim, std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
      if (r.p != p || r.status != "ok") continue;
      ++s.effective_m;
      s.converged += r.converged ? 1 : 0;
      for (std::size_t i = 0; i < dim; ++i) s.mean[i] += r.error[i];
    }
    if (s.effective_m == 0) {
      s.mean.assign(dim, std::numeric_limits<double>::quiet_NaN());
    } else {
      for (auto& v : s.mean) v /= s.effective_m;
    }
    if (s.effective_m >= 2) {
      std::vector<double> ss(dim, 0.0);
      for (const auto& r : rows) {
        if (r.p != p || r.status != "ok") continue;
        for (std::size_t i = 0; i < dim; ++i) ss[i] += (r.error[i] - s.mean[i]) * (r.error[i] - s.mean[i]);
      }
      for (std::size_t i = 0; i < dim; ++i) s.sd[i] = std::sqrt(ss[i] / (s.effective_m - 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream o;
  o << "replication,seed,p,status,converged,iterations,objective";
  for (const auto& n : r.names) o << ',' << n << "_hat";
  for (const auto& n : r.names) o << ',' << n << "_err";
  o << ",message\n";
  for (const auto& row : r.rows) {
    o << row.replication << ',' << row.seed << ',' << row.p << ',' << row.status << ',' << (row.converged ? 1 : 0)
      << ',' << row.iterations << ',' << (row.status == "ok" ? fmt17(row.objective) : "nan");
    for (std::size_t i = 0; i < r.names.size(); ++i) o << ',' << (row.status == "ok" ? fmt17(row.theta_hat[i]) : "nan");
    for (std::size_t i = 0; i < r.names.size(); ++i) o << ',' << (row.status == "ok" ? fmt17(row.error[i]) : "nan");
    o << ',' << csv_text(row.message) << '\n';
  }
  return o.str();
}

std::string summary_csv(const ExperimentReport& r) {
  std::ostringstream o;
  o << "p,effective_m,converged";
  for (const auto& n : r.names) o << ",mean_" << n << "_err";
  for (const auto& n : r.names) o << ",sd_" << n << "_err";
  o << '\n';
  for (const auto& s : r.summary) {
    o << s.p << ',' << s.effective_m << ',' << s.converged;
    for (double v : s.mean) o << ',' << fmt17(v);
    for (double v : s.sd) o << ',' << fmt17(v);
    o << '\n';
  }
  return o.str();
}

// ---- entry point ----

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Contrast estimation for hypo-elliptic diffusions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;

  const std::vector<std::pair<const char*, const char*>> subs = {
      {"simulate", "simulate observation sets"},
      {"estimate", "estimate parameters from one data file"},
      {"experiment", "run seeded Monte-Carlo replications"},
      {"validate", "check a model's ingredients"},
      {"precision", "asymptotic precision matrix and standard errors"}};
  for (const auto& [name, desc] : subs) {
    auto* s = app.add_subcommand(name, desc);
    s->add_option("--config", config_path, "JSON config file")->required();
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--jobs", jobs, "concurrent replications")->check(CLI::PositiveNumber);
    s->add_option("--seed", seed, "override the config seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CliContext c;
    std::ifstream f(config_path);
    if (!f) throw ConfigError("cannot open config file " + config_path);
    std::stringstream buf;
    buf << f.rdbuf();
    c.config_text = buf.str();
    try {
      c.config = json::parse(c.config_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    c.out = out_dir;
    c.jobs = jobs;
    c.seed = seed;
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "simulate") return cmd_simulate(c);
    if (cmd == "estimate") return cmd_estimate(c);
    if (cmd == "experiment") return cmd_experiment(c);
    if (cmd == "validate") return cmd_validate(c);
    return cmd_precision(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedOrder& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace hypo
