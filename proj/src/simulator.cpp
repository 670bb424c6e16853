#include "parisian/simulator.hpp"

#include "parisian/error.hpp"
#include "parisian/g_minimizer.hpp"
#include "parisian/gaussian.hpp"
#include "parisian/parallel.hpp"
#include "parisian/rng.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace parisian {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform tied to (seed, path, step) so that runs with different u or r see the
// same draw at the same step.
double keyed_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step) {
  const std::uint64_t x = splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dULL) ^ splitmix64(path) ^ (step * 0x9e3779b97f4a7c15ULL));
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

struct PathSpec {
  Eigen::MatrixXd chol;
  Eigen::VectorXd drift_step;
  Eigen::VectorXd start;
  double sqrt_dt = 0.0;
  double dt = 0.0;
  long steps = 0;
  ClockRule clock = ClockRule::Bridge;
  std::uint64_t seed = 0;
};

// Ruin times for ascending budgets along one path; kInf when not reached.
void run_path(const PathSpec& p, const std::vector<double>& budgets, std::uint64_t noise_stream, double sign,
              std::uint64_t key, std::vector<double>& taus) {
  const int d = static_cast<int>(p.start.size());
  Engine rng = stream_engine(p.seed, noise_stream);
  boost::random::normal_distribution<double> normal;
  taus.assign(budgets.size(), kInf);
  std::size_t next = 0;
  double clock = 0.0;
  const bool bridge_1d = p.clock == ClockRule::Bridge && d == 1;

  if (d == 1) {
    const double sd = p.chol(0, 0) * p.sqrt_dt;
    const double var = sd * sd;
    const double drift = p.drift_step(0);
    double x = p.start(0);
    for (long k = 0; k < p.steps && next < budgets.size(); ++k) {
      const double y = x + drift - sign * sd * normal(rng);
      const double t = k * p.dt;
      if (p.clock == ClockRule::GridPoint) {
        if (y < 0.0) {
          clock += p.dt;
          while (next < budgets.size() && clock > budgets[next]) taus[next++] = t + p.dt;
        }
      } else if (bridge_1d && budgets[next] == 0.0 && x >= 0.0 && y >= 0.0) {
        const double exponent = 2.0 * x * y / var;
        if (exponent < 50.0 && keyed_uniform(p.seed, key, static_cast<std::uint64_t>(k)) < std::exp(-exponent)) {
          while (next < budgets.size() && budgets[next] == 0.0) taus[next++] = t + 0.5 * p.dt;
        }
      } else if (x < 0.0 || y < 0.0) {
        double lo = 0.0;
        double hi = 1.0;
        if (x >= 0.0) lo = x / (x - y);
        if (y >= 0.0) hi = x / (x - y);
        const double before = clock;
        clock += (hi - lo) * p.dt;
        while (next < budgets.size() && clock > budgets[next]) {
          taus[next] = t + (lo + (budgets[next] - before) / p.dt) * p.dt;
          taus[next] = std::max(taus[next], t + lo * p.dt);
          ++next;
        }
      }
      x = y;
    }
    return;
  }

  std::vector<double> x(p.start.data(), p.start.data() + d);
  std::vector<double> y(d);
  std::vector<double> noise(d);
  for (long k = 0; k < p.steps && next < budgets.size(); ++k) {
    for (int i = 0; i < d; ++i) noise[i] = normal(rng);
    bool all_negative = true;
    for (int i = 0; i < d; ++i) {
      double shock = 0.0;
      for (int j = 0; j <= i; ++j) shock += p.chol(i, j) * noise[j];
      y[i] = x[i] + p.drift_step(i) - sign * p.sqrt_dt * shock;
      all_negative = all_negative && y[i] < 0.0;
    }
    const double t = k * p.dt;
    if (p.clock == ClockRule::GridPoint) {
      if (all_negative) {
        clock += p.dt;
        while (next < budgets.size() && clock > budgets[next]) taus[next++] = t + p.dt;
      }
    } else {
      double lo = 0.0;
      double hi = 1.0;
      for (int i = 0; i < d && lo < hi; ++i) {
        const double a = x[i];
        const double b = y[i];
        if (a >= 0.0 && b >= 0.0) {
          hi = lo;
        } else if (a >= 0.0) {
          lo = std::max(lo, a / (a - b));
        } else if (b >= 0.0) {
          hi = std::min(hi, a / (a - b));
        }
      }
      if (hi > lo) {
        const double before = clock;
        clock += (hi - lo) * p.dt;
        while (next < budgets.size() && clock > budgets[next]) {
          taus[next] = t + std::max(lo, lo + (budgets[next] - before) / p.dt) * p.dt;
          ++next;
        }
      }
    }
    x.swap(y);
  }
}

PathSpec make_spec(const RiskModel& model, double u, const ResolvedGrid& grid, const SimConfig& config) {
  PathSpec p;
  p.chol = PdFactor(model.sigma).lower();
  p.dt = grid.dt;
  p.sqrt_dt = std::sqrt(grid.dt);
  p.drift_step = model.mu * grid.dt;
  p.start = model.alpha * u;
  p.steps = grid.steps;
  p.clock = config.clock;
  p.seed = config.seed;
  return p;
}

// Per path: noise stream, sign and key for the bridge uniforms.
void path_noise(const SimConfig& config, std::size_t path, std::uint64_t& stream, double& sign) {
  if (config.antithetic) {
    stream = path / 2;
    sign = path % 2 == 0 ? 1.0 : -1.0;
  } else {
    stream = path;
    sign = 1.0;
  }
}

}  // namespace

std::string_view to_string(ClockRule rule) { return rule == ClockRule::Bridge ? "bridge" : "grid-point"; }

std::optional<ClockRule> parse_clock_rule(std::string_view text) {
  if (text == "bridge") return ClockRule::Bridge;
  if (text == "grid-point") return ClockRule::GridPoint;
  return std::nullopt;
}

ResolvedGrid resolve_grid(const RiskModel& model, double u, const SimConfig& config) {
  require(std::isfinite(u) && u >= 0.0, "u must be >= 0");
  ResolvedGrid g;
  g.t0 = minimize_g(model).t0;
  const double scale = g.t0 * u;
  if (config.horizon) {
    g.horizon = *config.horizon;
  } else {
    require(config.horizon_mult >= 1.0, "horizon multiple must be >= 1");
    require(u > 0.0, "u = 0 needs an explicit horizon");
    g.horizon = config.horizon_mult * scale;
  }
  require(g.horizon > 0.0 && std::isfinite(g.horizon), "horizon must be positive");
  if (config.dt) {
    g.dt = *config.dt;
    require(g.dt > 0.0, "dt must be positive");
    if (u > 0.0) require(g.dt <= scale / 256.0 * (1.0 + 1e-12), "dt must not exceed t0 u / 256");
  } else {
    require(u > 0.0, "u = 0 needs an explicit dt");
    g.dt = scale / 1024.0;
  }
  g.steps = static_cast<long>(std::ceil(g.horizon / g.dt - 1e-9));
  return g;
}

SimEstimate simulate_ruin(const RiskModel& model, double r, double u, const SimConfig& config) {
  require(std::isfinite(r) && r >= 0.0, "budget r must be >= 0");
  require(config.n_paths >= 1, "need at least one path");
  require(!config.antithetic || config.n_paths % 2 == 0, "antithetic sampling needs an even path count");
  const ResolvedGrid grid = resolve_grid(model, u, config);
  const PathSpec spec = make_spec(model, u, grid, config);

  const std::size_t n = static_cast<std::size_t>(config.n_paths);
  std::vector<double> tau(n, kInf);
  const std::vector<double> budgets{r};
  parallel_for(n, config.threads, [&](std::size_t path) {
    std::uint64_t stream = 0;
    double sign = 1.0;
    path_noise(config, path, stream, sign);
    std::vector<double> taus;
    run_path(spec, budgets, stream, sign, path, taus);
    tau[path] = taus[0];
  });

  SimEstimate out;
  out.n_paths = config.n_paths;
  out.dt = grid.dt;
  out.horizon = grid.horizon;
  out.t0 = grid.t0;
  out.clock = config.clock;
  out.seed = config.seed;
  out.antithetic = config.antithetic;
  for (std::size_t i = 0; i < n; ++i) {
    if (tau[i] <= grid.horizon) {
      ++out.ruined;
      if (config.keep_times) out.ruin_times.push_back(tau[i]);
    }
  }
  const double count = static_cast<double>(n);
  out.p_hat = out.ruined / count;
  if (config.antithetic) {
    const std::size_t pairs = n / 2;
    double ss = 0.0;
    for (std::size_t j = 0; j < pairs; ++j) {
      const double m = 0.5 * ((tau[2 * j] <= grid.horizon) + (tau[2 * j + 1] <= grid.horizon));
      ss += (m - out.p_hat) * (m - out.p_hat);
    }
    const double var = pairs > 1 ? ss / (pairs - 1.0) : 0.0;
    out.ci_half_width = 1.96 * std::sqrt(var / pairs);
  } else {
    out.ci_half_width = 1.96 * std::sqrt(out.p_hat * (1.0 - out.p_hat) / count);
  }
  return out;
}

RuinTimeSamples ruin_time_samples(const RiskModel& model, double r1, double r2, double u, const SimConfig& config) {
  require(std::isfinite(r1) && std::isfinite(r2) && 0.0 <= r1 && r1 <= r2, "need 0 <= r1 <= r2");
  require(u > 0.0, "u must be positive");
  require(!config.antithetic || config.n_paths % 2 == 0, "antithetic sampling needs an even path count");
  const ResolvedGrid grid = resolve_grid(model, u, config);
  const PathSpec spec = make_spec(model, u, grid, config);
  const GMinimum gm = minimize_g(model);

  const std::size_t n = static_cast<std::size_t>(config.n_paths);
  std::vector<double> tau1(n, kInf);
  std::vector<double> tau2(n, kInf);
  const std::vector<double> budgets{r1, r2};
  parallel_for(n, config.threads, [&](std::size_t path) {
    std::uint64_t stream = 0;
    double sign = 1.0;
    path_noise(config, path, stream, sign);
    std::vector<double> taus;
    run_path(spec, budgets, stream, sign, path, taus);
    tau1[path] = taus[0];
    tau2[path] = taus[1];
  });

  RuinTimeSamples out;
  out.grid = grid;
  out.centre = gm.t0 * u;
  out.scale = std::sqrt(2.0 * u / gm.gtilde);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(tau1[i] <= grid.horizon)) continue;
    ++out.conditioned;
    if (tau2[i] <= grid.horizon) {
      out.standardized.push_back((tau2[i] - out.centre) / out.scale);
      out.standardized_r1.push_back((tau1[i] - out.centre) / out.scale);
    } else {
      ++out.censored;
    }
  }
  out.empty = out.conditioned == 0;
  return out;
}

}  // namespace parisian
