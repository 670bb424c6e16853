#include "parisian/constants.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace parisian;

TEST_SUITE("constants") {
  TEST_CASE("psi with empty K is one") {
    const RiskModel model = two_line_model(0.0, {1, 1}, {1, 1});
    const GMinimum gm = minimize_g(model);
    const PsiSpec spec = make_psi_spec(gm, model);
    for (double x : {-3.0, 0.0, 5.0}) CHECK(psi(spec, x).value == 1.0);
  }

  TEST_CASE("one-dimensional constant is one") {
    const RiskModel model = make_model(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
    const CConstant c = c_constant(minimize_g(model), model);
    CHECK(c.value == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("empty K matches the gaussian integral") {
    Eigen::Matrix3d s;
    s << 1.0, 0.2, -0.1, 0.2, 1.5, 0.3, -0.1, 0.3, 0.8;
    const RiskModel model = make_model(s, Eigen::Vector3d(1.0, 0.7, 1.2), Eigen::Vector3d(0.9, 1.1, 0.6));
    const GMinimum gm = minimize_g(model);
    REQUIRE(gm.weakly_essential.empty());
    const CConstant c = c_constant(gm, model);
    const double det = take(model.sigma, gm.essential, gm.essential).determinant();
    const double closed = 1.0 / std::sqrt(std::pow(2 * std::numbers::pi * gm.t0, gm.m) * det) *
                          std::sqrt(4 * std::numbers::pi / gm.gtilde);
    CHECK(c.value == doctest::Approx(closed).epsilon(1e-10));
  }

  TEST_CASE("boundary pair with zero direction gives one half") {
    const RiskModel model = two_line_model(0.5, {1, 0.5}, {1, 0.5});
    const GMinimum gm = minimize_g(model);
    const PsiSpec spec = make_psi_spec(gm, model);
    REQUIRE(spec.direction.size() == 1);
    CHECK(std::abs(spec.direction(0)) <= 1e-9);
    CHECK(spec.d_kk(0, 0) == doctest::Approx(0.75));
    CHECK(psi(spec, 1.0).value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(c_constant(gm, model).value == doctest::Approx(0.5).epsilon(1e-8));
  }

  TEST_CASE("boundary pair with nonzero direction stays below the empty-K bound") {
    // alpha = 0.5, mu = 0.3 has threshold 0.4.
    const RiskModel model = two_line_model(0.4, {1, 0.3}, {1, 0.5});
    const GMinimum gm = minimize_g(model);
    REQUIRE(gm.weakly_essential == IndexSet{1});
    const PsiSpec spec = make_psi_spec(gm, model);
    const double slope = (0.3 - 0.4) / std::sqrt(1 - 0.16);
    for (double x : {-2.0, 0.3, 1.7})
      CHECK(psi(spec, x).value == doctest::Approx(phi_survival(slope * x)).epsilon(1e-8));
    const CConstant c = c_constant(gm, model);
    const double bound = 1.0 / std::sqrt(2 * std::numbers::pi * gm.t0) * std::sqrt(4 * std::numbers::pi / gm.gtilde);
    CHECK(c.converged);
    CHECK(c.value > 0.0);
    CHECK(c.value < bound);
  }

  TEST_CASE("invariant under relabeling") {
    Eigen::Matrix3d s;
    s << 1.0, 0.6, 0.2, 0.6, 1.2, 0.1, 0.2, 0.1, 0.9;
    const Eigen::Vector3d mu(0.8, 1.0, 1.4);
    const Eigen::Vector3d alpha(1.0, 0.9, 0.5);
    const RiskModel a = make_model(s, mu, alpha);
    Eigen::PermutationMatrix<3> p;
    p.indices() << 2, 0, 1;
    const Eigen::Matrix3d sp = p * s * p.transpose();
    const RiskModel b = make_model(sp, p * mu, p * alpha);
    const double ca = c_constant(minimize_g(a), a).value;
    const double cb = c_constant(minimize_g(b), b).value;
    CHECK(ca == doctest::Approx(cb).epsilon(1e-10));
  }
}
