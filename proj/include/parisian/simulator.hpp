#pragma once

#include "parisian/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace parisian {

enum class ClockRule {
  /// d = 1, r = 0: exact Brownian-bridge crossing inside each step. Otherwise the
  /// clock measures the time the linear interpolation spends below zero in every component.
  Bridge,
  /// The clock advances by dt at grid points where every component is negative.
  GridPoint,
};

std::string_view to_string(ClockRule rule);
std::optional<ClockRule> parse_clock_rule(std::string_view text);

struct SimConfig {
  /// Horizon as a multiple of t0 u, unless `horizon` is given.
  double horizon_mult = 3.0;
  std::optional<double> horizon;
  /// Defaults to t0 u / 1024. When u > 0 the step must not exceed t0 u / 256.
  std::optional<double> dt;
  long n_paths = 100000;
  std::uint64_t seed = 1;
  /// Pairs paths with negated noise; n_paths must then be even.
  bool antithetic = false;
  ClockRule clock = ClockRule::Bridge;
  /// <= 0 uses default_threads().
  int threads = 0;
  bool keep_times = true;
};

struct SimEstimate {
  double p_hat = 0.0;
  /// 95% normal-approximation half-width.
  double ci_half_width = 0.0;
  /// Ruin times of ruined paths, in path order.
  std::vector<double> ruin_times;
  long n_paths = 0;
  long ruined = 0;
  double dt = 0.0;
  double horizon = 0.0;
  double t0 = 0.0;
  ClockRule clock = ClockRule::Bridge;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

struct ResolvedGrid {
  double t0 = 0.0;
  double dt = 0.0;
  double horizon = 0.0;
  long steps = 0;
};

/// Horizon and step for (model, u, config); throws when the step rule is violated.
ResolvedGrid resolve_grid(const RiskModel& model, double u, const SimConfig& config);

SimEstimate simulate_ruin(const RiskModel& model, double r, double u, const SimConfig& config = {});

struct RuinTimeSamples {
  /// (tau_{r2} - t0 u) / sqrt(2u / gtilde) for paths with tau_{r1} <= horizon and tau_{r2} <= horizon.
  std::vector<double> standardized;
  /// The matching standardized tau_{r1}, aligned with `standardized`.
  std::vector<double> standardized_r1;
  /// Paths ruined at r1 but not at r2 within the horizon.
  long censored = 0;
  /// Paths with tau_{r1} <= horizon.
  long conditioned = 0;
  bool empty = true;
  double centre = 0.0;
  double scale = 0.0;
  ResolvedGrid grid;
};

RuinTimeSamples ruin_time_samples(const RiskModel& model, double r1, double r2, double u, const SimConfig& config = {});

}  // namespace parisian
