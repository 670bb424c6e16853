#pragma once

#include "parisian/constants.hpp"
#include "parisian/g_minimizer.hpp"
#include "parisian/model.hpp"
#include "parisian/pickands.hpp"

#include <optional>

namespace parisian {

/// Below this natural log the probability is reported on the log scale only.
constexpr double kLogUnderflow = -708.0;

struct AsymptoticConfig {
  /// Estimate H by simulation even when a closed form exists (m = 1).
  bool h_monte_carlo = false;
  HConfig h;
  MvnOptions mvn;
  DoublingPolicy quadrature;
};

struct AsymptoticResult {
  GMinimum gm;
  CConstant c;
  HEstimate h;
  bool h_closed_form = false;

  /// log C + log H + ((1 - m)/2) log u - ghat u / 2
  double log_approx(double u) const;
  /// exp(log_approx(u)), or nothing when that underflows.
  std::optional<double> approx(double u) const;
};

AsymptoticResult asymptotic_ruin(const RiskModel& model, double r, const AsymptoticConfig& config = {});

/// Exact ruin probability of a single line with variance sigma2: the m = 1 oracle.
double exact_one_dim_ruin(double sigma2, double mu, double alpha, double r, double u);

/// Limit law of (tau_{r2}(u) - t0 u) / sqrt(2u / gtilde) given tau_{r1}(u) < infinity.
class CondRuinTimeLaw {
 public:
  CondRuinTimeLaw(const RiskModel& model, double r1, double r2, const AsymptoticConfig& config = {});

  double cdf(double s) const;
  /// H(r2) / H(r1), the mass at s = +infinity.
  double mass() const { return ratio_; }
  const GMinimum& minimum() const { return gm_; }
  double h_r1() const { return h1_; }
  double h_r2() const { return h2_; }

 private:
  double weighted(double x) const;
  double lower_integral(double s) const;
  double upper_integral(double s) const;

  GMinimum gm_;
  PsiSpec psi_;
  MvnOptions mvn_;
  double h1_ = 0.0;
  double h2_ = 0.0;
  double ratio_ = 1.0;
  double total_ = 0.0;
  double below_zero_ = 0.0;
};

double cond_ruin_time_cdf(const RiskModel& model, double r1, double r2, double s, const AsymptoticConfig& config = {});

}  // namespace parisian
