#pragma once

#include "parisian/g_minimizer.hpp"
#include "parisian/model.hpp"
#include "parisian/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace parisian {

/// Grid path of (X(t) - mu t)_I started at 0 with exact Gaussian increments.
struct SojournPath {
  double dt = 0.0;
  double horizon = 0.0;
  /// m x (n + 1) values at times 0, dt, 2 dt, ..., horizon (the last step may be shorter).
  Eigen::MatrixXd values;
};

SojournPath simulate_sojourn_path(const GMinimum& gm, const RiskModel& model, double horizon, double dt,
                                  Engine& rng);

/// Exponential weights c = Sigma_II^{-1} b_I / t0; E exp(c . (X(t) - mu t)_I) = 1 for all t.
Eigen::VectorXd exponent_weights(const GMinimum& gm, const RiskModel& model);

/// Integral over x of exp(c . x) 1{S(x) > r}, where S(x) = dt * #{grid points with values > x}.
/// Exact for m = 1; importance sampled with `inner_samples` draws for m >= 2.
double per_path_integral(const SojournPath& path, const Eigen::VectorXd& c, double r, int inner_samples,
                         Engine& rng);

enum class HMethod {
  /// Two-sided path tilted at the window centre; estimates H(r) directly.
  Stationary,
  /// Path on [0, T] tilted at a uniform grid point; estimates H(r, T) / T.
  FiniteHorizon,
  /// Untilted path on [0, T]; averages per_path_integral / T.
  Naive,
};

std::string_view to_string(HMethod method);
std::optional<HMethod> parse_h_method(std::string_view text);

struct HConfig {
  double horizon = 32.0;
  /// <= 0 selects horizon / 2048.
  double dt = 0.0;
  long n_paths = 10000;
  int inner_samples = 16;
  std::uint64_t seed = 1;
  HMethod method = HMethod::Stationary;
  /// Bridge sub-steps per grid step near the sojourn level (m = 1, r > 0).
  int refine = 16;
  /// <= 0 uses default_threads().
  int threads = 0;

  double step() const { return dt > 0.0 ? dt : horizon / 2048.0; }
};

struct HEstimate {
  double r = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  long n_paths = 0;
  int inner_samples = 0;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  HMethod method = HMethod::Stationary;
};

/// Estimates for several budgets from the same simulated paths, so results are
/// non-increasing in r for a fixed seed.
std::vector<HEstimate> estimate_h(const GMinimum& gm, const RiskModel& model, const std::vector<double>& r,
                                  const HConfig& config);

HEstimate estimate_h(const GMinimum& gm, const RiskModel& model, double r, const HConfig& config);

/// Closed form for a single line with unit variance and drift mu.
double h_oned_closed_form(double mu, double r);

/// Closed form for m = 1 in a general model: sigma * h(mu_i / sigma, r), sigma^2 = Sigma_ii.
double h_closed_form_for(const GMinimum& gm, const RiskModel& model, double r);

struct HLadder {
  std::vector<HEstimate> rungs;
  /// Last two rungs agree within three combined standard errors.
  bool t_stable = false;
  /// Last rung repeated with half the step, when requested.
  std::optional<HEstimate> half_step;
};

/// Runs estimate_h at each horizon. Unless config.dt is set, each rung uses horizon / 2048.
HLadder estimate_h_ladder(const GMinimum& gm, const RiskModel& model, double r, const std::vector<double>& horizons,
                          const HConfig& config, bool half_step_check = false);

}  // namespace parisian
