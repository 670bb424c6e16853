#include "parisian/two_dim.hpp"

#include "parisian/error.hpp"
#include "parisian/g_minimizer.hpp"
#include "parisian/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace parisian {

namespace {

bool in_group_one(double alpha, double mu) {
  return (mu < 1.0 && alpha < 1.0) || (mu < 1.0 && alpha >= 1.0 && mu <= 1.0 / alpha) ||
         (mu >= 1.0 && alpha < 1.0 && mu <= 1.0 / alpha);
}

double reduced_h_first(double r_tilde) { return h_oned_closed_form(1.0, r_tilde); }

double reduced_h_second(double mu, double r_tilde) { return h_oned_closed_form(mu, r_tilde); }

}  // namespace

TwoDimReduction reduce(const RiskModel& model, double r, double u) {
  require(model.dim() == 2, "two-line reduction needs d = 2");
  if (std::abs(model.sigma(0, 0) - 1.0) > 1e-12 || std::abs(model.sigma(1, 1) - 1.0) > 1e-12)
    fail(ErrorCode::InvalidArgument, "two-line formulas need unit variances");
  require(r >= 0.0 && u >= 0.0, "need r >= 0 and u >= 0");
  TwoDimReduction out;
  out.alpha1 = model.alpha(0);
  out.mu1 = model.mu(0);
  out.v = out.alpha1 * out.mu1 * u;
  out.mu_ratio = model.mu(1) / model.mu(0);
  out.alpha_ratio = model.alpha(1) / model.alpha(0);
  out.r_tilde = out.mu1 * out.mu1 * r;
  out.rho = model.sigma(0, 1);
  return out;
}

RiskModel auxiliary_model(double rho, double alpha_ratio, double mu_ratio) {
  return two_line_model(rho, Eigen::Vector2d(1.0, mu_ratio), Eigen::Vector2d(1.0, alpha_ratio));
}

std::string RegimeClassification::label() const {
  std::string out = group == ConditionGroup::I ? "i." : "ii.";
  out += regime == Regime::R1 ? "R1" : regime == Regime::R2 ? "R2" : "R3";
  return out;
}

RegimeClassification classify(double alpha_ratio, double mu_ratio, double rho) {
  require(alpha_ratio > 0.0 && mu_ratio > 0.0, "ratios must be positive");
  require(std::abs(rho) < 1.0, "correlation must lie in (-1,1)");
  const double a = alpha_ratio;
  const double m = mu_ratio;
  RegimeClassification out;
  out.group = in_group_one(a, m) ? ConditionGroup::I : ConditionGroup::II;
  out.threshold = out.group == ConditionGroup::I ? 0.5 * (a + m) : (a + m) / (2.0 * a * m);
  if (std::abs(rho - out.threshold) <= kRegimeTieTolerance * std::max(1.0, std::abs(out.threshold)))
    out.regime = Regime::R2;
  else
    out.regime = rho < out.threshold ? Regime::R1 : Regime::R3;

  const double one_minus = 1.0 - rho * rho;
  const double quad_alpha = 1.0 + a * a - 2.0 * a * rho;
  out.t0_joint = std::sqrt(quad_alpha / (1.0 + m * m - 2.0 * m * rho));
  out.t0_first = 1.0;
  out.t0_second = a / m;

  if (out.regime == Regime::R1) {
    const double t = out.t0_joint;
    out.t0 = t;
    out.essential = {0, 1};
    out.ghat = 2.0 / t * quad_alpha / one_minus + 2.0 * (1.0 + a * m - m * rho - a * rho) / one_minus;
    out.gtilde = 2.0 / (t * t * t) * quad_alpha / one_minus;
  } else if (out.group == ConditionGroup::I) {
    out.t0 = out.t0_first;
    out.essential = {0};
    if (out.regime == Regime::R2) out.weakly_essential = {1};
    out.ghat = 4.0;
    out.gtilde = 2.0;
  } else {
    out.t0 = out.t0_second;
    out.essential = {1};
    if (out.regime == Regime::R2) out.weakly_essential = {0};
    out.ghat = 4.0 * a * m;
    out.gtilde = 2.0 * m * m * m / a;
  }
  return out;
}

TwoDimAsymptotic two_dim_asymptotic(const RiskModel& model, double r, double u, const HConfig& h_config) {
  require(u > 0.0, "u must be positive");
  TwoDimAsymptotic out;
  out.u = u;
  out.reduction = reduce(model, r, u);
  const auto& red = out.reduction;
  out.regime = classify(red.alpha_ratio, red.mu_ratio, red.rho);
  const auto& cls = out.regime;
  const double scale = red.alpha1 * red.mu1;
  out.rate = 0.5 * cls.ghat * scale;
  out.h.r = red.r_tilde;

  if (cls.regime == Regime::R1) {
    const RiskModel aux = auxiliary_model(red.rho, red.alpha_ratio, red.mu_ratio);
    out.h = estimate_h(minimize_g(aux), aux, red.r_tilde, h_config);
    out.h_closed_form = false;
    out.prefactor = 1.0 / std::sqrt(scale * cls.t0 * cls.t0 * std::numbers::pi * (1.0 - red.rho * red.rho) * cls.gtilde);
    out.power = -0.5;
  } else if (cls.group == ConditionGroup::I) {
    out.h.value = reduced_h_first(red.r_tilde);
    out.prefactor = cls.regime == Regime::R2 ? 0.5 : 1.0;
  } else {
    out.h.value = reduced_h_second(red.mu_ratio, red.r_tilde);
    out.prefactor = (cls.regime == Regime::R2 ? 0.5 : 1.0) / red.mu_ratio;
  }
  out.log_value = std::log(out.prefactor) + std::log(out.h.value) + out.power * std::log(u) - out.rate * u;
  if (out.log_value >= -708.0) out.value = std::exp(out.log_value);
  return out;
}

TwoDimCondLaw::TwoDimCondLaw(const RiskModel& model, double r1, double r2, const HConfig& h_config) {
  require(0.0 <= r1 && r1 <= r2 && std::isfinite(r2), "need 0 <= r1 <= r2");
  reduction_ = reduce(model, r1, 1.0);
  const auto& red = reduction_;
  regime_ = classify(red.alpha_ratio, red.mu_ratio, red.rho);
  const double m1 = red.mu1 * red.mu1;
  if (r1 != r2) {
    if (regime_.regime == Regime::R1) {
      const RiskModel aux = auxiliary_model(red.rho, red.alpha_ratio, red.mu_ratio);
      const auto h = estimate_h(minimize_g(aux), aux, {m1 * r1, m1 * r2}, h_config);
      ratio_ = h[0].value > 0.0 ? h[1].value / h[0].value : 0.0;
    } else if (regime_.group == ConditionGroup::I) {
      ratio_ = reduced_h_first(m1 * r2) / reduced_h_first(m1 * r1);
    } else {
      ratio_ = reduced_h_second(red.mu_ratio, m1 * r2) / reduced_h_second(red.mu_ratio, m1 * r1);
    }
  }
  const double root = std::sqrt(1.0 - red.rho * red.rho);
  if (regime_.regime == Regime::R2) {
    psi_slope_ = regime_.group == ConditionGroup::I ? (red.mu_ratio - red.rho) / root
                                                    : (1.0 - red.rho * red.mu_ratio) / (root * red.mu_ratio);
  }
}

double TwoDimCondLaw::cdf(double s) const {
  if (regime_.regime != Regime::R2) return ratio_ * phi_cdf(s);
  // sqrt(2/pi) * integral_{-inf}^s exp(-x^2/2) Psi(k x) dx = 2 P{X <= s, Y > k X}.
  const double k = psi_slope_;
  const double corr = -k / std::sqrt(1.0 + k * k);
  const double both_below = bivariate_survival(-s, 0.0, corr);
  return ratio_ * std::clamp(2.0 * (phi_cdf(s) - both_below), 0.0, 1.0);
}

double TwoDimCondLaw::centre(double u) const {
  return reduction_.to_original_time(regime_.t0 * reduction_.alpha1 * reduction_.mu1 * u);
}

double TwoDimCondLaw::scale(double u) const {
  return reduction_.to_original_time(std::sqrt(2.0 * reduction_.alpha1 * reduction_.mu1 * u / regime_.gtilde));
}

double two_dim_cond_law(const RiskModel& model, double r1, double r2, double s, const HConfig& h_config) {
  return TwoDimCondLaw(model, r1, r2, h_config).cdf(s);
}

}  // namespace parisian
