#include "parisian/pickands.hpp"

#include "parisian/error.hpp"
#include "parisian/gaussian.hpp"
#include "parisian/parallel.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace parisian {

namespace {

using Normal = boost::random::normal_distribution<double>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Bridge excursions beyond this many standard deviations of a step are ignored
// (probability below exp(-72)).
constexpr double kBandSigmas = 6.0;

struct Segment {
  double lo;
  double hi;
  double h;
};

// Occupation S(x) of the piecewise linear path above x, and -dS/dx.
std::pair<double, double> occupation_above(const std::vector<Segment>& segments, double x) {
  double occupation = 0.0;
  double slope = 0.0;
  for (const auto& s : segments) {
    if (x >= s.hi) continue;
    if (x <= s.lo) {
      occupation += s.h;
    } else {
      const double k = s.h / (s.hi - s.lo);
      occupation += k * (s.hi - x);
      slope += k;
    }
  }
  return {occupation, slope};
}

// Levels L_q = sup{x : S(x) > r_q} for the occupation S of the piecewise linear
// path made of `segments`, searching only x >= floor. `r` is ascending and
// positive. Returns how many leading levels were resolved above floor.
std::size_t solve_levels(const std::vector<Segment>& segments, const std::vector<double>& r, double floor,
                         std::vector<double>& levels) {
  double top = kNegInf;
  for (const auto& s : segments) top = std::max(top, s.hi);
  double upper = top;
  for (std::size_t q = 0; q < r.size(); ++q) {
    double lo = floor;
    double hi = upper;
    if (std::isfinite(lo)) {
      if (occupation_above(segments, lo).first <= r[q]) return q;
    } else {
      double total = 0.0;
      for (const auto& s : segments) total += s.h;
      if (total <= r[q]) return q;
      lo = hi - 1.0;
      while (occupation_above(segments, lo).first <= r[q]) lo = hi - 2.0 * (hi - lo);
    }
    // S is continuous and non-increasing; Newton steps inside the bracket, bisection otherwise.
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
      const auto [occ, slope] = occupation_above(segments, x);
      if (occ > r[q])
        lo = x;
      else
        hi = x;
      double next = slope > 0.0 ? x + (occ - r[q]) / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      if (step <= 1e-15 * (1.0 + std::abs(x)) || hi - lo <= 1e-14 * (1.0 + std::abs(x))) break;
    }
    levels[q] = std::min(x, upper);
    upper = levels[q];
  }
  return r.size();
}

double log_sum_exp(const double* v, std::size_t n) {
  double top = kNegInf;
  for (std::size_t i = 0; i < n; ++i) top = std::max(top, v[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - top);
  return top + std::log(s);
}

// Maximum of a Brownian bridge from a to b over a step with variance var.
double bridge_max(double a, double b, double var, double uniform) {
  return 0.5 * (a + b + std::sqrt((a - b) * (a - b) - 2.0 * var * std::log(uniform)));
}

struct Setup {
  int m = 0;
  Eigen::MatrixXd chol;
  Eigen::VectorXd mu;
  Eigen::VectorXd tilt_drift;
  Eigen::VectorXd c;
  double sigma = 0.0;
  double log_c_product = 0.0;
};

Setup make_setup(const GMinimum& gm, const RiskModel& model) {
  Setup s;
  s.m = gm.m;
  const PdFactor f(take(model.sigma, gm.essential, gm.essential));
  s.chol = f.lower();
  s.mu = take(model.mu, gm.essential);
  s.tilt_drift = take(model.alpha, gm.essential) / gm.t0;
  s.c = exponent_weights(gm, model);
  s.sigma = s.chol(0, 0);
  s.log_c_product = s.c.array().log().sum();
  return s;
}

struct Workspace {
  std::vector<double> z;
  std::vector<double> scratch;
  std::vector<int> offset;
  std::vector<double> fine;
  std::vector<Segment> segments;
  std::vector<double> levels;
  Eigen::MatrixXd zm;
  Eigen::VectorXd noise;
};

// Scalar path with z[tilt] = 0, drift +tilt_drift before and -mu after the tilt index.
void scalar_two_sided(const Setup& s, int n, int tilt, double dt, Engine& rng, Normal& normal,
                      std::vector<double>& z) {
  z.assign(n + 1, 0.0);
  const double sd = s.sigma * std::sqrt(dt);
  const double down = -s.mu(0) * dt;
  const double up = s.tilt_drift(0) * dt;
  for (int k = tilt + 1; k <= n; ++k) z[k] = z[k - 1] + down + sd * normal(rng);
  for (int k = tilt - 1; k >= 0; --k) z[k] = z[k + 1] - up - sd * normal(rng);
}

void vector_two_sided(const Setup& s, int n, int tilt, double dt, Engine& rng, Normal& normal, Workspace& ws) {
  ws.zm.setZero(s.m, n + 1);
  ws.noise.resize(s.m);
  const double root = std::sqrt(dt);
  for (int k = tilt + 1; k <= n; ++k) {
    for (int i = 0; i < s.m; ++i) ws.noise(i) = normal(rng);
    ws.zm.col(k) = ws.zm.col(k - 1) - s.mu * dt + root * (s.chol * ws.noise);
  }
  for (int k = tilt - 1; k >= 0; --k) {
    for (int i = 0; i < s.m; ++i) ws.noise(i) = normal(rng);
    ws.zm.col(k) = ws.zm.col(k + 1) - s.tilt_drift * dt - root * (s.chol * ws.noise);
  }
}

// Levels of the continuous-time occupation for m = 1 on the grid path ws.z.
// Entries of `r` are ascending and below the window length. Writes ws.levels.
void scalar_levels(const Setup& s, const std::vector<double>& r, double dt, int refine, Engine& rng,
                   Normal& normal, Workspace& ws) {
  const auto& z = ws.z;
  const int n = static_cast<int>(z.size()) - 1;
  ws.levels.assign(r.size(), kNegInf);
  const double zmax = *std::max_element(z.begin(), z.end());
  const double var = s.sigma * s.sigma * dt;
  const double delta = kBandSigmas * std::sqrt(var);

  std::vector<double> positive;
  for (double v : r)
    if (v > 0.0) positive.push_back(v);
  const std::size_t zeros = r.size() - positive.size();

  if (positive.empty()) {
    double top = zmax;
    for (int i = 0; i < n; ++i) {
      const double a = z[i];
      const double b = z[i + 1];
      if (std::max(a, b) < zmax - delta) continue;
      top = std::max(top, bridge_max(a, b, var, open_uniform(rng)));
    }
    for (std::size_t q = 0; q < zeros; ++q) ws.levels[q] = top;
    return;
  }

  const double sub_h = dt / refine;
  const double sub_var = var / refine;
  ws.offset.assign(n, -1);
  ws.fine.clear();
  auto refine_interval = [&](int i) {
    ws.offset[i] = static_cast<int>(ws.fine.size());
    const double a = z[i];
    const double b = z[i + 1];
    ws.fine.push_back(a);
    double prev = a;
    for (int j = 1; j < refine; ++j) {
      const double remaining = static_cast<double>(refine - j + 1);
      const double mean = prev + (b - prev) / remaining;
      const double sd = std::sqrt(sub_var * (remaining - 1.0) / remaining);
      prev = mean + sd * normal(rng);
      ws.fine.push_back(prev);
    }
    ws.fine.push_back(b);
  };

  // Start the band from the grid order statistic for the largest budget.
  const double r_max = positive.back();
  const std::size_t rank = std::min<std::size_t>(static_cast<std::size_t>(std::floor(r_max / dt)) + 1, z.size());
  ws.scratch.assign(z.begin(), z.end());
  std::nth_element(ws.scratch.begin(), ws.scratch.begin() + (rank - 1), ws.scratch.end(), std::greater<>());
  double band = ws.scratch[rank - 1] - delta;
  const double zmin = *std::min_element(z.begin(), z.end());

  std::vector<double> found_levels(positive.size(), kNegInf);
  for (int attempt = 0;; ++attempt) {
    const bool everything = band < zmin - delta;
    const double floor = everything ? kNegInf : band;
    ws.segments.clear();
    for (int i = 0; i < n; ++i) {
      const double a = z[i];
      const double b = z[i + 1];
      if (!everything && std::max(a, b) < band) continue;
      if (ws.offset[i] < 0) refine_interval(i);
      const double* f = ws.fine.data() + ws.offset[i];
      for (int j = 0; j < refine; ++j) {
        const double lo = std::min(f[j], f[j + 1]);
        const double hi = std::max(f[j], f[j + 1]);
        if (hi >= floor) ws.segments.push_back({lo, hi, sub_h});
      }
    }
    const std::size_t got = solve_levels(ws.segments, positive, floor, found_levels);
    if (everything || (got == positive.size() && found_levels.back() >= band + 0.5 * delta)) break;
    band = (got == positive.size() ? found_levels.back() : band) - delta;
    if (attempt > 1000) fail(ErrorCode::Numerical, "sojourn level search did not settle");
  }
  for (std::size_t q = 0; q < positive.size(); ++q) ws.levels[zeros + q] = found_levels[q];

  if (zeros > 0) {
    double vmax = zmax;
    for (double v : ws.fine) vmax = std::max(vmax, v);
    double top = vmax;
    const double sub_delta = kBandSigmas * std::sqrt(sub_var);
    for (int i = 0; i < n; ++i) {
      if (ws.offset[i] >= 0) {
        const double* f = ws.fine.data() + ws.offset[i];
        for (int j = 0; j < refine; ++j) {
          if (std::max(f[j], f[j + 1]) < vmax - sub_delta) continue;
          top = std::max(top, bridge_max(f[j], f[j + 1], sub_var, open_uniform(rng)));
        }
      } else if (std::max(z[i], z[i + 1]) >= vmax - delta) {
        top = std::max(top, bridge_max(z[i], z[i + 1], var, open_uniform(rng)));
      }
    }
    for (std::size_t q = 0; q < zeros; ++q) ws.levels[q] = top;
  }
}

// Grid-count importance sampling: for each budget, the integral of exp(c.x) 1{S(x) > r}
// as exp(c.Mx) / prod(c) * fraction, returned on the log scale (log(0) = -inf).
void grid_importance(const Eigen::MatrixXd& values, const Eigen::VectorXd& c, double log_c_product, double dt,
                     const std::vector<double>& r, int inner_samples, Engine& rng, std::vector<double>& log_out) {
  const int m = static_cast<int>(values.rows());
  const Eigen::Index points = values.cols();
  const Eigen::VectorXd top = values.rowwise().maxCoeff();
  std::vector<int> hits(r.size(), 0);
  Eigen::VectorXd x(m);
  for (int j = 0; j < inner_samples; ++j) {
    for (int i = 0; i < m; ++i) x(i) = top(i) - standard_exponential(rng) / c(i);
    long count = 0;
    for (Eigen::Index k = 0; k < points; ++k) {
      bool above = true;
      for (int i = 0; i < m && above; ++i) above = values(i, k) > x(i);
      count += above;
    }
    const double occupation = dt * static_cast<double>(count);
    for (std::size_t q = 0; q < r.size(); ++q) hits[q] += occupation > r[q];
  }
  const double base = c.dot(top) - log_c_product;
  log_out.resize(r.size());
  for (std::size_t q = 0; q < r.size(); ++q)
    log_out[q] = hits[q] == 0 ? kNegInf : base + std::log(static_cast<double>(hits[q]) / inner_samples);
}

struct Plan {
  std::vector<double> r;  // ascending
  std::vector<std::size_t> order;  // order[q] = caller index of r[q]
};

Plan make_plan(const std::vector<double>& r) {
  Plan p;
  p.order.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) p.order[i] = i;
  std::stable_sort(p.order.begin(), p.order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  for (std::size_t i : p.order) p.r.push_back(r[i]);
  return p;
}

// Writes per-budget contributions of one path (ascending budget order) to out.
void path_contribution(const Setup& s, const HConfig& cfg, const std::vector<double>& r, int n, double dt,
                       double window, Engine& rng, Workspace& ws, double* out) {
  Normal normal;
  std::vector<double> log_f(r.size(), kNegInf);
  double log_d = 0.0;
  if (cfg.method == HMethod::Naive) {
    SojournPath path;
    path.dt = dt;
    path.horizon = window;
    path.values.setZero(s.m, n + 1);
    const double root = std::sqrt(dt);
    ws.noise.resize(s.m);
    for (int k = 1; k <= n; ++k) {
      for (int i = 0; i < s.m; ++i) ws.noise(i) = normal(rng);
      path.values.col(k) = path.values.col(k - 1) - s.mu * dt + root * (s.chol * ws.noise);
    }
    if (s.m == 1) {
      std::vector<double>& v = ws.scratch;
      v.assign(path.values.data(), path.values.data() + n + 1);
      std::sort(v.begin(), v.end(), std::greater<>());
      for (std::size_t q = 0; q < r.size(); ++q) {
        const std::size_t rank = static_cast<std::size_t>(std::floor(r[q] / dt)) + 1;
        if (r[q] >= window || rank > v.size()) continue;
        log_f[q] = s.c(0) * v[rank - 1] - std::log(s.c(0));
      }
    } else {
      grid_importance(path.values, s.c, s.log_c_product, dt, r, cfg.inner_samples, rng, log_f);
    }
    for (std::size_t q = 0; q < r.size(); ++q)
      out[q] = std::isfinite(log_f[q]) ? std::exp(log_f[q]) / window : 0.0;
    return;
  }

  const int tilt = cfg.method == HMethod::Stationary
                       ? n / 2
                       : static_cast<int>(std::min<double>(n, std::floor(open_uniform(rng) * (n + 1))));
  std::vector<double> usable;
  for (double v : r)
    if (v < window) usable.push_back(v);
  if (s.m == 1) {
    scalar_two_sided(s, n, tilt, dt, rng, normal, ws.z);
    ws.scratch.resize(ws.z.size());
    for (std::size_t k = 0; k < ws.z.size(); ++k) ws.scratch[k] = s.c(0) * ws.z[k];
    log_d = std::log(dt) + log_sum_exp(ws.scratch.data(), ws.scratch.size());
    if (!usable.empty()) scalar_levels(s, usable, dt, cfg.refine, rng, normal, ws);
    for (std::size_t q = 0; q < usable.size(); ++q)
      if (std::isfinite(ws.levels[q])) log_f[q] = s.c(0) * ws.levels[q] - std::log(s.c(0));
  } else {
    vector_two_sided(s, n, tilt, dt, rng, normal, ws);
    const Eigen::VectorXd exponents = ws.zm.transpose() * s.c;
    log_d = std::log(dt) + log_sum_exp(exponents.data(), static_cast<std::size_t>(exponents.size()));
    std::vector<double> part;
    grid_importance(ws.zm, s.c, s.log_c_product, dt, usable, cfg.inner_samples, rng, part);
    for (std::size_t q = 0; q < usable.size(); ++q) log_f[q] = part[q];
  }
  for (std::size_t q = 0; q < r.size(); ++q) out[q] = std::isfinite(log_f[q]) ? std::exp(log_f[q] - log_d) : 0.0;
}

}  // namespace

SojournPath simulate_sojourn_path(const GMinimum& gm, const RiskModel& model, double horizon, double dt,
                                  Engine& rng) {
  require(horizon > 0.0 && dt > 0.0 && dt <= horizon, "need 0 < dt <= horizon");
  const Setup s = make_setup(gm, model);
  const int n = static_cast<int>(std::ceil(horizon / dt - 1e-9));
  SojournPath path;
  path.dt = dt;
  path.horizon = horizon;
  path.values.setZero(s.m, n + 1);
  Normal normal;
  Eigen::VectorXd noise(s.m);
  for (int k = 1; k <= n; ++k) {
    const double h = k == n ? horizon - (n - 1) * dt : dt;
    for (int i = 0; i < s.m; ++i) noise(i) = normal(rng);
    path.values.col(k) = path.values.col(k - 1) - s.mu * h + std::sqrt(h) * (s.chol * noise);
  }
  return path;
}

Eigen::VectorXd exponent_weights(const GMinimum& gm, const RiskModel& model) {
  const PdFactor f(take(model.sigma, gm.essential, gm.essential));
  return f.solve(take(gm.b, gm.essential)) / gm.t0;
}

double per_path_integral(const SojournPath& path, const Eigen::VectorXd& c, double r, int inner_samples,
                         Engine& rng) {
  require(c.size() == path.values.rows(), "weights and path dimensions differ");
  require((c.array() > 0.0).all(), "exponential weights must be positive");
  require(r >= 0.0, "budget must be >= 0");
  if (r >= path.horizon) return 0.0;
  const Eigen::Index points = path.values.cols();
  if (c.size() == 1) {
    const std::size_t rank = static_cast<std::size_t>(std::floor(r / path.dt)) + 1;
    if (rank > static_cast<std::size_t>(points)) return 0.0;
    std::vector<double> v(path.values.data(), path.values.data() + points);
    std::nth_element(v.begin(), v.begin() + (rank - 1), v.end(), std::greater<>());
    return std::exp(c(0) * v[rank - 1]) / c(0);
  }
  require(inner_samples > 0, "inner_samples must be positive");
  std::vector<double> log_f;
  grid_importance(path.values, c, c.array().log().sum(), path.dt, {r}, inner_samples, rng, log_f);
  return std::isfinite(log_f[0]) ? std::exp(log_f[0]) : 0.0;
}

std::string_view to_string(HMethod method) {
  switch (method) {
    case HMethod::Stationary:
      return "stationary";
    case HMethod::FiniteHorizon:
      return "finite-horizon";
    case HMethod::Naive:
      return "naive";
  }
  return "unknown";
}

std::optional<HMethod> parse_h_method(std::string_view text) {
  for (HMethod m : {HMethod::Stationary, HMethod::FiniteHorizon, HMethod::Naive})
    if (text == to_string(m)) return m;
  return std::nullopt;
}

std::vector<HEstimate> estimate_h(const GMinimum& gm, const RiskModel& model, const std::vector<double>& r,
                                  const HConfig& config) {
  require(!r.empty(), "at least one budget is needed");
  require(config.horizon > 0.0, "horizon must be positive");
  require(config.n_paths >= 2, "need at least two paths");
  require(config.inner_samples >= 1, "inner_samples must be positive");
  require(config.refine >= 1, "refine must be positive");
  for (double v : r) require(std::isfinite(v) && v >= 0.0, "budgets must be >= 0");
  const double dt = config.step();
  require(dt > 0.0 && dt <= config.horizon, "need 0 < dt <= horizon");

  const Setup s = make_setup(gm, model);
  require((s.c.array() > 0.0).all(), "exponential weights must be positive");
  const int n = static_cast<int>(std::llround(config.horizon / dt));
  require(std::abs(n * dt - config.horizon) <= 1e-9 * config.horizon, "horizon must be a multiple of dt");
  const Plan plan = make_plan(r);
  const std::size_t nr = r.size();

  std::vector<double> per_path(static_cast<std::size_t>(config.n_paths) * nr);
  parallel_for(static_cast<std::size_t>(config.n_paths), config.threads, [&](std::size_t p) {
    thread_local Workspace ws;
    Engine rng = stream_engine(config.seed, p);
    path_contribution(s, config, plan.r, n, dt, config.horizon, rng, ws, per_path.data() + p * nr);
  });

  std::vector<HEstimate> out(nr);
  const double count = static_cast<double>(config.n_paths);
  for (std::size_t q = 0; q < nr; ++q) {
    double sum = 0.0;
    for (long p = 0; p < config.n_paths; ++p) sum += per_path[p * nr + q];
    const double mean = sum / count;
    double ss = 0.0;
    for (long p = 0; p < config.n_paths; ++p) {
      const double d = per_path[p * nr + q] - mean;
      ss += d * d;
    }
    HEstimate& e = out[plan.order[q]];
    e.r = plan.r[q];
    e.horizon = config.horizon;
    e.dt = dt;
    e.n_paths = config.n_paths;
    e.inner_samples = s.m == 1 ? 0 : config.inner_samples;
    e.value = mean;
    e.std_error = std::sqrt(ss / (count - 1.0) / count);
    e.seed = config.seed;
    e.method = config.method;
  }
  return out;
}

HEstimate estimate_h(const GMinimum& gm, const RiskModel& model, double r, const HConfig& config) {
  return estimate_h(gm, model, std::vector<double>{r}, config).front();
}

double h_oned_closed_form(double mu, double r) {
  require(mu > 0.0, "drift must be positive");
  require(r >= 0.0, "budget must be >= 0");
  const double root = std::sqrt(r);
  return mu * (2.0 * (1.0 + mu * mu * r) * phi_survival(mu * root) -
               mu * std::sqrt(2.0 * r) / std::sqrt(std::numbers::pi) * std::exp(-0.5 * mu * mu * r));
}

double h_closed_form_for(const GMinimum& gm, const RiskModel& model, double r) {
  require(gm.m == 1, "closed form needs a single essential coordinate");
  const int i = gm.essential.front();
  const double sigma = std::sqrt(model.sigma(i, i));
  return sigma * h_oned_closed_form(model.mu(i) / sigma, r);
}

HLadder estimate_h_ladder(const GMinimum& gm, const RiskModel& model, double r, const std::vector<double>& horizons,
                          const HConfig& config, bool half_step_check) {
  require(!horizons.empty(), "ladder needs at least one horizon");
  HLadder ladder;
  for (double horizon : horizons) {
    HConfig rung = config;
    rung.horizon = horizon;
    ladder.rungs.push_back(estimate_h(gm, model, r, rung));
  }
  if (ladder.rungs.size() >= 2) {
    const HEstimate& a = ladder.rungs[ladder.rungs.size() - 2];
    const HEstimate& b = ladder.rungs.back();
    ladder.t_stable = std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error);
  }
  if (half_step_check) {
    HConfig half = config;
    half.horizon = horizons.back();
    half.dt = ladder.rungs.back().dt / 2.0;
    ladder.half_step = estimate_h(gm, model, r, half);
  }
  return ladder;
}

}  // namespace parisian
