#include "parisian/two_dim.hpp"

#include "parisian/asymptotics.hpp"
#include "parisian/g_minimizer.hpp"
#include "parisian/gaussian.hpp"
#include "parisian/qp.hpp"

#include <doctest.h>

#include <cmath>

using namespace parisian;

TEST_SUITE("two_dim") {
  TEST_CASE("reduction examples") {
    const TwoDimReduction a = reduce(two_line_model(0.0, {1, 1}, {1, 1}), 2.0, 3.0);
    CHECK(a.v == 3.0);
    CHECK(a.mu_ratio == 1.0);
    CHECK(a.alpha_ratio == 1.0);
    CHECK(a.r_tilde == 2.0);
    const TwoDimReduction b = reduce(two_line_model(0.2, {2, 1}, {0.5, 1}), 1.0, 1.0);
    CHECK(b.v == doctest::Approx(1.0));
    CHECK(b.mu_ratio == doctest::Approx(0.5));
    CHECK(b.alpha_ratio == doctest::Approx(2.0));
    CHECK(b.r_tilde == doctest::Approx(4.0));
    CHECK(b.to_original_u(b.v) == doctest::Approx(1.0));
    CHECK(b.to_original_time(b.to_reduced_time(0.37)) == doctest::Approx(0.37));
  }

  TEST_CASE("reduction needs unit variances") {
    Eigen::Matrix2d s;
    s << 2.0, 0.1, 0.1, 1.0;
    CHECK_THROWS(reduce(make_model(s, Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)), 0.0, 1.0));
  }

  TEST_CASE("classification examples") {
    const RegimeClassification r1 = classify(0.5, 0.5, 0.0);
    CHECK(r1.label() == "i.R1");
    CHECK(r1.t0 == doctest::Approx(1.0));
    CHECK(r1.ghat == doctest::Approx(5.0));
    CHECK(r1.essential == IndexSet{0, 1});
    CHECK(r1.weakly_essential.empty());

    const RegimeClassification r2 = classify(0.5, 0.5, 0.5);
    CHECK(r2.label() == "i.R2");
    CHECK(r2.essential == IndexSet{0});
    CHECK(r2.weakly_essential == IndexSet{1});
    CHECK(r2.ghat == 4.0);
    CHECK(r2.gtilde == 2.0);

    const RegimeClassification r3 = classify(2.0, 2.0, 0.9);
    CHECK(r3.label() == "ii.R3");
    CHECK(r3.threshold == doctest::Approx(0.5));
    CHECK(r3.essential == IndexSet{1});
    CHECK(r3.ghat == doctest::Approx(16.0));
    CHECK(r3.gtilde == doctest::Approx(8.0));
  }

  TEST_CASE("group boundary is inclusive for group i") {
    CHECK(classify(2.0, 0.5, 0.0).group == ConditionGroup::I);
    CHECK(classify(0.5, 2.0, 0.0).group == ConditionGroup::I);
    CHECK(classify(2.0, 0.6, 0.0).group == ConditionGroup::II);
    CHECK(classify(1.0, 1.0, 0.0).group == ConditionGroup::II);
  }

  TEST_CASE("threshold consistency") {
    for (double a : {0.4, 1.0, 2.5})
      for (double m : {0.4, 0.7, 1.5}) {
        const double th = classify(a, m, 0.0).threshold;
        if (th >= 1.0 - 2e-6) continue;
        CAPTURE(a);
        CAPTURE(m);
        CHECK(classify(a, m, th - 1e-6).regime == Regime::R1);
        CHECK(classify(a, m, th + 1e-6).regime == Regime::R3);
        const RegimeClassification tie = classify(a, m, th);
        CHECK(tie.regime == Regime::R2);
        CHECK(tie.weakly_essential.size() == 1);
      }
  }

  TEST_CASE("joint rate equals the quadratic form at t0") {
    const double a = 0.7;
    const double m = 0.4;
    const double rho = 0.1;
    const RegimeClassification cls = classify(a, m, rho);
    REQUIRE(cls.regime == Regime::R1);
    const RiskModel aux = auxiliary_model(rho, a, m);
    const Eigen::VectorXd b = aux.alpha + aux.mu * cls.t0;
    const double form = b.dot(aux.sigma.ldlt().solve(b)) / cls.t0;
    CHECK(cls.ghat == doctest::Approx(form).epsilon(1e-10));
  }

  TEST_CASE("classification agrees with the general minimizer") {
    for (double a : {0.4, 1.0, 2.5})
      for (double m : {0.4, 0.7, 1.5})
        for (double rho : {-0.3, 0.3}) {
          const RegimeClassification cls = classify(a, m, rho);
          const GMinimum gm = minimize_g(auxiliary_model(rho, a, m));
          CAPTURE(a);
          CAPTURE(m);
          CAPTURE(rho);
          CHECK(gm.essential == cls.essential);
          CHECK(gm.weakly_essential == cls.weakly_essential);
          CHECK(gm.t0 == doctest::Approx(cls.t0).epsilon(1e-8));
          CHECK(gm.ghat == doctest::Approx(cls.ghat).epsilon(1e-8));
          CHECK(gm.gtilde == doctest::Approx(cls.gtilde).epsilon(1e-8));
        }
  }

  TEST_CASE("display values") {
    // alpha_1 mu_1 u = 2 throughout.
    const TwoDimAsymptotic r2 = two_dim_asymptotic(two_line_model(0.5, {1, 0.5}, {1, 0.5}), 0.0, 2.0);
    CHECK(r2.regime.label() == "i.R2");
    CHECK(*r2.value == doctest::Approx(0.00915782).epsilon(1e-6));
    const TwoDimAsymptotic r3 = two_dim_asymptotic(two_line_model(0.6, {1, 0.5}, {1, 0.5}), 0.0, 2.0);
    CHECK(r3.regime.label() == "i.R3");
    CHECK(*r3.value == doctest::Approx(0.0183156).epsilon(1e-6));
    // alpha = mu = 2 in reduced coordinates and alpha_2 mu_2 u = 2.
    const TwoDimAsymptotic ii = two_dim_asymptotic(two_line_model(0.9, {1, 2}, {1, 2}), 0.0, 0.5);
    CHECK(ii.regime.group == ConditionGroup::II);
    CHECK(ii.regime.regime == Regime::R3);
    CHECK(*ii.value == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
  }

  TEST_CASE("original coordinates rescale consistently") {
    // Doubling mu_1 and halving alpha_1 leaves v unchanged.
    const TwoDimAsymptotic base = two_dim_asymptotic(two_line_model(0.6, {1, 0.5}, {1, 0.5}), 0.5, 2.0);
    const TwoDimAsymptotic scaled = two_dim_asymptotic(two_line_model(0.6, {2, 1}, {0.5, 0.25}), 0.125, 2.0);
    CHECK(scaled.reduction.r_tilde == doctest::Approx(base.reduction.r_tilde));
    CHECK(*scaled.value == doctest::Approx(*base.value).epsilon(1e-12));
  }

  TEST_CASE("regime one display uses the pickands estimate") {
    HConfig cfg;
    cfg.horizon = 4.0;
    cfg.n_paths = 100;
    const TwoDimAsymptotic res = two_dim_asymptotic(two_line_model(0.0, {1, 0.5}, {1, 0.5}), 0.0, 2.0, cfg);
    CHECK(res.regime.regime == Regime::R1);
    CHECK_FALSE(res.h_closed_form);
    CHECK(res.power == -0.5);
    CHECK(res.h.value > 0.0);
    CHECK(res.rate == doctest::Approx(2.5));
  }

  TEST_CASE("conditional laws") {
    CHECK(two_dim_cond_law(two_line_model(0.0, {1, 0.5}, {1, 0.5}), 0.0, 0.0, 0.0) == doctest::Approx(0.5));
    const TwoDimCondLaw r2(two_line_model(0.5, {1, 0.5}, {1, 0.5}), 0.0, 0.0);
    CHECK(r2.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r2.cdf(50.0) == doctest::Approx(1.0).epsilon(1e-12));
    // Group ii boundary with mu_1 = rho mu_2: the slope inside Psi vanishes.
    const double rho = 0.5;
    const double m = 1.0 / rho;
    const double a = m / (2.0 * rho * m - 1.0);  // threshold (a + m) / (2 a m) equals rho
    const TwoDimCondLaw ii(two_line_model(rho, {1, m}, {1, a}), 0.0, 0.0);
    CHECK(ii.regime().label() == "ii.R2");
    CHECK(ii.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  }

  TEST_CASE("boundary law matches the general quadrature") {
    const RiskModel model = two_line_model(0.4, {1.0, 0.3}, {1.0, 0.5});
    const TwoDimCondLaw closed(model, 0.0, 0.0);
    REQUIRE(closed.regime().label() == "i.R2");
    const CondRuinTimeLaw general(model, 0.0, 0.0);
    for (double s : {-2.0, -0.5, 0.0, 0.7, 2.5}) CHECK(closed.cdf(s) == doctest::Approx(general.cdf(s)).epsilon(1e-6));
    CHECK(closed.centre(3.0) == doctest::Approx(minimize_g(model).t0 * 3.0));
    CHECK(closed.scale(3.0) == doctest::Approx(std::sqrt(2.0 * 3.0 / minimize_g(model).gtilde)));
  }
}
