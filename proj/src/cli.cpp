#include "parisian/cli.hpp"

#include "parisian/asymptotics.hpp"
#include "parisian/error.hpp"
#include "parisian/g_minimizer.hpp"
#include "parisian/model.hpp"
#include "parisian/pickands.hpp"
#include "parisian/qp.hpp"
#include "parisian/simulator.hpp"
#include "parisian/two_dim.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace parisian {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

json one_based(const IndexSet& set) {
  json out = json::array();
  for (int i : set) out.push_back(i + 1);
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

json model_json(const RiskModel& model) {
  return {{"sigma", to_json(model.sigma)}, {"mu", to_json(model.mu)}, {"alpha", to_json(model.alpha)}};
}

json versions() {
  return {{"parisian", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                        std::to_string(BOOST_VERSION % 100)}};
}

json minimum_json(const GMinimum& gm) {
  return {{"t0", gm.t0},
          {"I", one_based(gm.essential)},
          {"K", one_based(gm.weakly_essential)},
          {"J", one_based(gm.unessential)},
          {"m", gm.m},
          {"ghat", gm.ghat},
          {"gtilde", gm.gtilde},
          {"degenerate", gm.degenerate},
          {"boundary_tie", gm.boundary_tie}};
}

json h_json(const HEstimate& h) {
  return {{"r", h.r},
          {"horizon", h.horizon},
          {"dt", h.dt},
          {"n_paths", h.n_paths},
          {"inner_samples", h.inner_samples},
          {"value", h.value},
          {"std_error", h.std_error},
          {"seed", h.seed},
          {"method", std::string(to_string(h.method))}};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return 2;
    case ErrorCode::Parse:
    case ErrorCode::Schema:
      return 3;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotSymmetric:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::SingularFactor:
    case ErrorCode::NonPositiveDrift:
    case ErrorCode::NonPositiveAlpha:
      return 4;
    case ErrorCode::NoEssentialSet:
    case ErrorCode::BracketNotFound:
    case ErrorCode::Numerical:
      return 5;
    case ErrorCode::InvalidArgument:
      return 1;
  }
  return 1;
}

struct Common {
  std::string model_path;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string format;
};

json envelope(const char* command, const RiskModel& model, json config, json results, Clock::time_point start) {
  json out;
  out["command"] = command;
  out["versions"] = versions();
  out["model"] = model_json(model);
  out["config"] = std::move(config);
  out["results"] = std::move(results);
  out["wall_time"] = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void csv_header(std::ostream& out, const json& config) {
  for (const auto& [key, value] : config.items()) out << "# " << key << "=" << value.dump() << '\n';
}

// ---- qp ----

struct QpArgs {
  Common common;
  std::optional<double> t;
};

void cmd_qp(const QpArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const RiskModel model = load_model(a.common.model_path);
  double t = 0.0;
  std::string source = "given";
  if (a.t) {
    t = *a.t;
    require(t > 0.0, "--t must be positive");
  } else {
    t = minimize_g(model).t0;
    source = "t0";
  }
  const Eigen::VectorXd b = model.alpha + model.mu * t;
  const QpSolution qp = solve_pm(model.sigma, b);
  json passing = json::array();
  for (const auto& s : qp.passing_subsets) passing.push_back(one_based(s));
  json results = {{"t", t},
                  {"t_source", source},
                  {"b", to_json(b)},
                  {"I", one_based(qp.essential)},
                  {"K", one_based(qp.weakly_essential)},
                  {"J", one_based(qp.unessential)},
                  {"solution", to_json(qp.solution)},
                  {"value", qp.value},
                  {"passing_subsets", passing},
                  {"degenerate", qp.degenerate}};
  json config = {{"model_file", a.common.model_path}, {"t", a.t ? json(*a.t) : json(nullptr)}};
  emit(out, envelope("qp", model, config, results, start));
}

// ---- asym ----

struct AsymArgs {
  Common common;
  double r = 0.0;
  std::vector<double> u_list;
  std::vector<double> h_mc;
};

HConfig h_config_from(const std::vector<double>& spec, std::uint64_t seed, int threads) {
  HConfig h;
  if (!spec.empty()) {
    require(spec.size() == 3, "--h-mc expects paths,T,dt");
    require(spec[0] >= 2.0, "--h-mc needs at least two paths");
    h.n_paths = static_cast<long>(spec[0]);
    h.horizon = spec[1];
    h.dt = spec[2];
  }
  h.seed = seed;
  h.threads = threads;
  return h;
}

json h_config_json(const HConfig& h) {
  return {{"horizon", h.horizon}, {"dt", h.step()},           {"n_paths", h.n_paths},
          {"inner_samples", h.inner_samples}, {"refine", h.refine}, {"method", std::string(to_string(h.method))}};
}

void cmd_asym(const AsymArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const RiskModel model = load_model(a.common.model_path);
  require(!a.u_list.empty(), "--u-list is empty");
  for (double u : a.u_list) require(u > 0.0, "every u must be positive");
  const std::uint64_t seed = resolve_seed(a.common.seed);
  AsymptoticConfig cfg;
  cfg.h_monte_carlo = !a.h_mc.empty();
  cfg.h = h_config_from(a.h_mc, seed, a.common.threads);
  const AsymptoticResult res = asymptotic_ruin(model, a.r, cfg);

  json config = {{"model_file", a.common.model_path},
                 {"r", a.r},
                 {"u_list", a.u_list},
                 {"h_source", res.h_closed_form ? "closed-form" : "monte-carlo"},
                 {"seed", seed}};
  if (!res.h_closed_form) config["h_mc"] = h_config_json(cfg.h);

  if (a.common.format == "csv") {
    csv_header(out, config);
    out << "# t0=" << num(res.gm.t0) << " ghat=" << num(res.gm.ghat) << " gtilde=" << num(res.gm.gtilde)
        << " m=" << res.gm.m << " C=" << num(res.c.value) << " H=" << num(res.h.value)
        << " H_se=" << num(res.h.std_error) << '\n';
    out << "u,value,log_value\n";
    for (double u : a.u_list) {
      const auto v = res.approx(u);
      out << num(u) << ',' << (v ? num(*v) : "") << ',' << num(res.log_approx(u)) << '\n';
    }
    return;
  }
  json rows = json::array();
  for (double u : a.u_list) {
    const auto v = res.approx(u);
    rows.push_back({{"u", u}, {"value", v ? json(*v) : json(nullptr)}, {"log_value", res.log_approx(u)}});
  }
  json results = minimum_json(res.gm);
  results["C"] = res.c.value;
  results["C_converged"] = res.c.converged;
  results["H"] = h_json(res.h);
  results["rows"] = rows;
  json env = envelope("asym", model, config, results, start);
  env["seed"] = seed;
  emit(out, env);
}

// ---- simulate ----

struct SimArgs {
  Common common;
  double r = 0.0;
  double u = 0.0;
  long paths = 100000;
  std::optional<double> dt;
  double horizon_mult = 3.0;
  std::optional<double> horizon;
  bool antithetic = false;
  std::string clock = "bridge";
  bool times = false;
};

void cmd_simulate(const SimArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const RiskModel model = load_model(a.common.model_path);
  SimConfig cfg;
  cfg.n_paths = a.paths;
  cfg.dt = a.dt;
  cfg.horizon_mult = a.horizon_mult;
  cfg.horizon = a.horizon;
  cfg.antithetic = a.antithetic;
  cfg.seed = resolve_seed(a.common.seed);
  cfg.threads = a.common.threads;
  cfg.keep_times = a.times;
  const auto rule = parse_clock_rule(a.clock);
  require(rule.has_value(), "--clock must be bridge or grid-point");
  cfg.clock = *rule;
  const SimEstimate est = simulate_ruin(model, a.r, a.u, cfg);

  json config = {{"model_file", a.common.model_path},
                 {"r", a.r},
                 {"u", a.u},
                 {"paths", a.paths},
                 {"dt", est.dt},
                 {"horizon", est.horizon},
                 {"horizon_mult", a.horizon ? json(nullptr) : json(a.horizon_mult)},
                 {"antithetic", a.antithetic},
                 {"clock", std::string(to_string(cfg.clock))},
                 {"seed", cfg.seed}};
  json results = {{"p_hat", est.p_hat},         {"ci_half_width", est.ci_half_width}, {"ruined", est.ruined},
                  {"n_paths", est.n_paths},     {"dt", est.dt},                       {"horizon", est.horizon},
                  {"t0", est.t0}};
  if (a.times) results["ruin_times"] = est.ruin_times;
  json env = envelope("simulate", model, config, results, start);
  env["seed"] = cfg.seed;
  emit(out, env);
}

// ---- two-dim ----

struct TwoDimArgs {
  Common common;
  double r = 0.0;
  double u = 1.0;
  std::vector<double> cond;
  std::vector<double> s_grid;
  long h_paths = 10000;
  double h_horizon = 32.0;
};

std::string group_name(ConditionGroup g) { return g == ConditionGroup::I ? "i" : "ii"; }

void cmd_two_dim(const TwoDimArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const RiskModel model = load_model(a.common.model_path);
  const std::uint64_t seed = resolve_seed(a.common.seed);
  HConfig h;
  h.n_paths = a.h_paths;
  h.horizon = a.h_horizon;
  h.seed = seed;
  h.threads = a.common.threads;
  const TwoDimAsymptotic res = two_dim_asymptotic(model, a.r, a.u, h);
  const auto& cls = res.regime;
  const auto& red = res.reduction;

  json results;
  results["regime"] = cls.label();
  results["group"] = group_name(cls.group);
  results["threshold"] = cls.threshold;
  results["rho"] = red.rho;
  results["reduction"] = {{"v", red.v}, {"mu_ratio", red.mu_ratio}, {"alpha_ratio", red.alpha_ratio}, {"r_tilde", red.r_tilde}};
  results["t0"] = cls.t0;
  results["t0_candidates"] = {cls.t0_joint, cls.t0_first, cls.t0_second};
  results["I"] = one_based(cls.essential);
  results["K"] = one_based(cls.weakly_essential);
  results["ghat"] = cls.ghat;
  results["gtilde"] = cls.gtilde;
  results["formula"] = {{"prefactor", res.prefactor}, {"power", res.power}, {"rate", res.rate}};
  results["H"] = h_json(res.h);
  results["h_source"] = res.h_closed_form ? "closed-form" : "monte-carlo";
  results["value"] = res.value ? json(*res.value) : json(nullptr);
  results["log_value"] = res.log_value;

  json config = {{"model_file", a.common.model_path}, {"r", a.r}, {"u", a.u}, {"seed", seed}};
  if (!res.h_closed_form) config["h_mc"] = h_config_json(h);
  if (!a.cond.empty()) {
    require(a.cond.size() == 2, "--cond expects r1 r2");
    std::vector<double> grid = a.s_grid;
    if (grid.empty())
      for (int i = -12; i <= 12; ++i) grid.push_back(0.25 * i);
    const TwoDimCondLaw law(model, a.cond[0], a.cond[1], h);
    json rows = json::array();
    for (double s : grid) rows.push_back({{"s", s}, {"cdf", law.cdf(s)}});
    results["cond"] = {{"r1", a.cond[0]},        {"r2", a.cond[1]},         {"mass", law.mass()},
                       {"centre", law.centre(a.u)}, {"scale", law.scale(a.u)}, {"rows", rows}};
    config["cond"] = a.cond;
    config["s_grid"] = grid;
  }
  json env = envelope("two-dim", model, config, results, start);
  env["seed"] = seed;
  emit(out, env);
}

// ---- hconst ----

struct HArgs {
  Common common;
  double r = 0.0;
  std::vector<double> ladder{8.0, 16.0, 32.0};
  long paths = 10000;
  int inner = 16;
  double dt = 0.0;
  std::string method = "stationary";
  bool half_step = false;
};

void cmd_hconst(const HArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const RiskModel model = load_model(a.common.model_path);
  const GMinimum gm = minimize_g(model);
  HConfig h;
  h.n_paths = a.paths;
  h.inner_samples = a.inner;
  h.dt = a.dt;
  h.seed = resolve_seed(a.common.seed);
  h.threads = a.common.threads;
  const auto method = parse_h_method(a.method);
  require(method.has_value(), "--method must be stationary, finite-horizon or naive");
  h.method = *method;
  const HLadder ladder = estimate_h_ladder(gm, model, a.r, a.ladder, h, a.half_step);
  const bool has_closed = gm.m == 1;
  const double closed = has_closed ? h_closed_form_for(gm, model, a.r) : 0.0;

  json config = {{"model_file", a.common.model_path},
                 {"r", a.r},
                 {"T_ladder", a.ladder},
                 {"paths", a.paths},
                 {"inner", a.inner},
                 {"dt", a.dt > 0.0 ? json(a.dt) : json("horizon/2048")},
                 {"method", a.method},
                 {"seed", h.seed},
                 {"I", one_based(gm.essential)}};
  if (a.common.format == "csv") {
    csv_header(out, config);
    out << "# t_stable=" << (ladder.t_stable ? "true" : "false");
    if (has_closed) out << " closed_form=" << num(closed);
    out << '\n';
    out << "rung,horizon,dt,n_paths,inner_samples,r,value,std_error,seed,method\n";
    auto row = [&](const std::string& name, const HEstimate& e) {
      out << name << ',' << num(e.horizon) << ',' << num(e.dt) << ',' << e.n_paths << ',' << e.inner_samples << ','
          << num(e.r) << ',' << num(e.value) << ',' << num(e.std_error) << ',' << e.seed << ',' << to_string(e.method)
          << '\n';
    };
    for (std::size_t i = 0; i < ladder.rungs.size(); ++i) row(std::to_string(i + 1), ladder.rungs[i]);
    if (ladder.half_step) row("half-step", *ladder.half_step);
    return;
  }
  json rungs = json::array();
  for (const auto& e : ladder.rungs) rungs.push_back(h_json(e));
  json results = {{"rungs", rungs},
                  {"t_stable", ladder.t_stable},
                  {"half_step", ladder.half_step ? h_json(*ladder.half_step) : json(nullptr)},
                  {"closed_form", has_closed ? json(closed) : json(nullptr)}};
  json env = envelope("hconst", model, config, results, start);
  env["seed"] = h.seed;
  emit(out, env);
}

void add_common(CLI::App* cmd, Common& c, bool with_seed, bool with_format, const std::string& default_format) {
  cmd->add_option("--model", c.model_path, "model JSON file")->required();
  if (with_seed) {
    cmd->add_option("--seed", c.seed, "random seed (derived from entropy and echoed when omitted)");
    cmd->add_option("--threads", c.threads, "worker threads (default: PARISIAN_THREADS or all cores)");
  }
  if (with_format) {
    c.format = default_format;
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cumulative Parisian ruin: asymptotics, constants and simulation", "parisian"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  QpArgs qp;
  auto* qp_cmd = app.add_subcommand("qp", "quadratic program at b = alpha + mu t (t defaults to t0)");
  add_common(qp_cmd, qp.common, false, false, "");
  qp_cmd->add_option("--t", qp.t, "time point");

  AsymArgs asym;
  auto* asym_cmd = app.add_subcommand("asym", "ruin-probability asymptotics over a list of u");
  add_common(asym_cmd, asym.common, true, true, "csv");
  asym_cmd->add_option("--r", asym.r, "occupation budget")->capture_default_str();
  asym_cmd->add_option("--u-list", asym.u_list, "comma-separated capital scales")->delimiter(',')->required();
  asym_cmd->add_option("--h-mc", asym.h_mc, "estimate H by simulation: paths,T,dt (dt 0 means T/2048)")
      ->delimiter(',')
      ->expected(3);

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "direct Monte Carlo of the ruin probability");
  add_common(sim_cmd, sim.common, true, false, "");
  sim_cmd->add_option("--r", sim.r, "occupation budget")->capture_default_str();
  sim_cmd->add_option("--u", sim.u, "capital scale")->required();
  sim_cmd->add_option("--paths", sim.paths, "number of paths")->capture_default_str();
  sim_cmd->add_option("--dt", sim.dt, "time step (default t0 u / 1024)");
  sim_cmd->add_option("--horizon-mult", sim.horizon_mult, "horizon as a multiple of t0 u")->capture_default_str();
  sim_cmd->add_option("--horizon", sim.horizon, "absolute horizon (overrides --horizon-mult)");
  sim_cmd->add_flag("--antithetic", sim.antithetic, "pair paths with negated noise");
  sim_cmd->add_option("--clock", sim.clock, "occupation clock rule")
      ->check(CLI::IsMember({"bridge", "grid-point"}))
      ->capture_default_str();
  sim_cmd->add_flag("--times", sim.times, "include ruin times in the output");

  TwoDimArgs two;
  auto* two_cmd = app.add_subcommand("two-dim", "closed-form regime and asymptotics for two unit-variance lines");
  add_common(two_cmd, two.common, true, false, "");
  two_cmd->add_option("--r", two.r, "occupation budget")->capture_default_str();
  two_cmd->add_option("--u", two.u, "capital scale")->capture_default_str();
  two_cmd->add_option("--cond", two.cond, "conditional ruin-time law for budgets r1 r2")->expected(2);
  two_cmd->add_option("--s-grid", two.s_grid, "comma-separated s values for --cond")->delimiter(',');
  two_cmd->add_option("--h-paths", two.h_paths, "paths for the joint constant (regime R1)")->capture_default_str();
  two_cmd->add_option("--h-horizon", two.h_horizon, "horizon for the joint constant")->capture_default_str();

  HArgs hc;
  auto* h_cmd = app.add_subcommand("hconst", "Pickands-type constant over a horizon ladder");
  add_common(h_cmd, hc.common, true, true, "csv");
  h_cmd->add_option("--r", hc.r, "occupation budget")->capture_default_str();
  h_cmd->add_option("--T-ladder", hc.ladder, "comma-separated horizons")->delimiter(',')->capture_default_str();
  h_cmd->add_option("--paths", hc.paths, "paths per rung")->capture_default_str();
  h_cmd->add_option("--inner", hc.inner, "inner samples for |I| >= 2")->capture_default_str();
  h_cmd->add_option("--dt", hc.dt, "grid step (default T/2048 per rung)");
  h_cmd->add_option("--method", hc.method, "estimator")
      ->check(CLI::IsMember({"stationary", "finite-horizon", "naive"}))
      ->capture_default_str();
  h_cmd->add_flag("--half-step", hc.half_step, "repeat the last rung with half the step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*qp_cmd) cmd_qp(qp, out);
    if (*asym_cmd) cmd_asym(asym, out);
    if (*sim_cmd) cmd_simulate(sim, out);
    if (*two_cmd) cmd_two_dim(two, out);
    if (*h_cmd) cmd_hconst(hc, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 5;
  }
  return 0;
}

}  // namespace parisian
