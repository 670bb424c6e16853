#pragma once

#include "parisian/index_set.hpp"
#include "parisian/model.hpp"
#include "parisian/pickands.hpp"

#include <optional>
#include <string>

namespace parisian {

/// Scalars of the self-similar reduction of a unit-variance two-line model.
struct TwoDimReduction {
  /// v = alpha_1 mu_1 u
  double v = 0.0;
  double mu_ratio = 0.0;
  double alpha_ratio = 0.0;
  /// r~ = mu_1^2 r
  double r_tilde = 0.0;
  double rho = 0.0;
  double alpha1 = 0.0;
  double mu1 = 0.0;

  /// Ruin times in reduced coordinates are mu_1^2 times the original ones.
  double to_original_time(double reduced) const { return reduced / (mu1 * mu1); }
  double to_reduced_time(double original) const { return original * mu1 * mu1; }
  double to_original_u(double reduced_v) const { return reduced_v / (alpha1 * mu1); }
};

/// Requires d = 2 and unit variances (within 1e-12).
TwoDimReduction reduce(const RiskModel& model, double r, double u);

/// Reduced model with alpha = (1, alpha_ratio), mu = (1, mu_ratio) and correlation rho.
RiskModel auxiliary_model(double rho, double alpha_ratio, double mu_ratio);

enum class ConditionGroup { I, II };
enum class Regime { R1, R2, R3 };

/// Relative tolerance for rho sitting on the regime threshold.
constexpr double kRegimeTieTolerance = 1e-9;

struct RegimeClassification {
  ConditionGroup group = ConditionGroup::I;
  Regime regime = Regime::R1;
  double threshold = 0.0;
  /// Candidate minimizers for both lines, the first line and the second line.
  double t0_joint = 0.0;
  double t0_first = 1.0;
  double t0_second = 0.0;
  double t0 = 0.0;
  IndexSet essential;
  IndexSet weakly_essential;
  double ghat = 0.0;
  double gtilde = 0.0;

  /// "i.R1" ... "ii.R3"
  std::string label() const;
};

RegimeClassification classify(double alpha_ratio, double mu_ratio, double rho);

struct TwoDimAsymptotic {
  TwoDimReduction reduction;
  RegimeClassification regime;
  /// P ~ prefactor * H * u^power * exp(-rate * u)
  double prefactor = 0.0;
  double power = 0.0;
  double rate = 0.0;
  HEstimate h;
  bool h_closed_form = true;
  double u = 0.0;
  double log_value = 0.0;
  std::optional<double> value;
};

/// Evaluates the regime's asymptotic display in original coordinates. The
/// joint-support constant is estimated on the reduced model with `h_config`.
TwoDimAsymptotic two_dim_asymptotic(const RiskModel& model, double r, double u, const HConfig& h_config = {});

/// Limit law of the standardized ruin time given ruin, for the regime of `model`.
class TwoDimCondLaw {
 public:
  TwoDimCondLaw(const RiskModel& model, double r1, double r2, const HConfig& h_config = {});

  double cdf(double s) const;
  /// Centre and scale of the standardization (tau - centre(u)) / scale(u) in original time.
  double centre(double u) const;
  double scale(double u) const;
  const RegimeClassification& regime() const { return regime_; }
  double mass() const { return ratio_; }

 private:
  TwoDimReduction reduction_;
  RegimeClassification regime_;
  double ratio_ = 1.0;
  /// Slope inside Psi for the boundary regimes.
  double psi_slope_ = 0.0;
};

double two_dim_cond_law(const RiskModel& model, double r1, double r2, double s, const HConfig& h_config = {});

}  // namespace parisian
