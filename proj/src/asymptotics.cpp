#include "parisian/asymptotics.hpp"

#include "parisian/error.hpp"
#include "parisian/gaussian.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace parisian {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double kQuadTolerance = 1e-13;

}  // namespace

double AsymptoticResult::log_approx(double u) const {
  require(u > 0.0, "u must be positive");
  return std::log(c.value) + std::log(h.value) + 0.5 * (1.0 - gm.m) * std::log(u) - 0.5 * gm.ghat * u;
}

std::optional<double> AsymptoticResult::approx(double u) const {
  const double l = log_approx(u);
  if (l < kLogUnderflow) return std::nullopt;
  return std::exp(l);
}

AsymptoticResult asymptotic_ruin(const RiskModel& model, double r, const AsymptoticConfig& config) {
  require(std::isfinite(r) && r >= 0.0, "budget r must be >= 0");
  AsymptoticResult out;
  out.gm = minimize_g(model);
  out.c = c_constant(out.gm, model, config.mvn, config.quadrature);
  if (out.gm.m == 1 && !config.h_monte_carlo) {
    out.h_closed_form = true;
    out.h.r = r;
    out.h.value = h_closed_form_for(out.gm, model, r);
  } else {
    out.h = estimate_h(out.gm, model, r, config.h);
  }
  return out;
}

double exact_one_dim_ruin(double sigma2, double mu, double alpha, double r, double u) {
  require(sigma2 > 0.0 && mu > 0.0 && alpha > 0.0, "need positive variance, drift and alpha");
  require(r >= 0.0 && u >= 0.0, "need r >= 0 and u >= 0");
  const double sigma = std::sqrt(sigma2);
  const double drift = mu / sigma;
  return h_oned_closed_form(drift, r) / drift * std::exp(-2.0 * mu * alpha * u / sigma2);
}

CondRuinTimeLaw::CondRuinTimeLaw(const RiskModel& model, double r1, double r2, const AsymptoticConfig& config)
    : mvn_(config.mvn) {
  require(std::isfinite(r1) && std::isfinite(r2) && 0.0 <= r1 && r1 <= r2, "need 0 <= r1 <= r2");
  gm_ = minimize_g(model);
  psi_ = make_psi_spec(gm_, model);
  if (r1 == r2) {
    ratio_ = 1.0;
  } else if (gm_.m == 1 && !config.h_monte_carlo) {
    h1_ = h_closed_form_for(gm_, model, r1);
    h2_ = h_closed_form_for(gm_, model, r2);
    ratio_ = h2_ / h1_;
  } else {
    const auto h = estimate_h(gm_, model, {r1, r2}, config.h);
    h1_ = h[0].value;
    h2_ = h[1].value;
    ratio_ = h1_ > 0.0 ? h2_ / h1_ : 0.0;
  }
  if (!psi_.weakly_essential.empty()) {
    below_zero_ = lower_integral(0.0);
    total_ = below_zero_ + upper_integral(0.0);
  }
}

double CondRuinTimeLaw::weighted(double x) const {
  const double w = std::exp(-0.5 * x * x);
  if (w == 0.0) return 0.0;
  return w * psi(psi_, std::sqrt(2.0 / gm_.gtilde) * x, mvn_).value;
}

double CondRuinTimeLaw::lower_integral(double s) const {
  const double inf = std::numeric_limits<double>::infinity();
  return Kronrod::integrate([this](double x) { return weighted(x); }, -inf, s, 15, kQuadTolerance);
}

double CondRuinTimeLaw::upper_integral(double s) const {
  const double inf = std::numeric_limits<double>::infinity();
  return Kronrod::integrate([this](double x) { return weighted(x); }, s, inf, 15, kQuadTolerance);
}

double CondRuinTimeLaw::cdf(double s) const {
  if (std::isnan(s)) fail(ErrorCode::InvalidArgument, "s is NaN");
  if (psi_.weakly_essential.empty()) return ratio_ * phi_cdf(s);
  if (s == -std::numeric_limits<double>::infinity()) return 0.0;
  if (s == std::numeric_limits<double>::infinity()) return ratio_;
  // Left of 0 integrate the lower tail; right of 0 subtract the upper tail, so
  // both branches are monotone and meet at 0.
  const double mass = s <= 0.0 ? lower_integral(s) : total_ - upper_integral(s);
  return ratio_ * std::clamp(mass / total_, 0.0, 1.0);
}

double cond_ruin_time_cdf(const RiskModel& model, double r1, double r2, double s, const AsymptoticConfig& config) {
  return CondRuinTimeLaw(model, r1, r2, config).cdf(s);
}

}  // namespace parisian
