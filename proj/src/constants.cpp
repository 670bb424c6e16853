#include "parisian/constants.hpp"

#include "parisian/error.hpp"

#include <cmath>
#include <numbers>

namespace parisian {

PsiSpec make_psi_spec(const GMinimum& gm, const RiskModel& model) {
  require(gm.t0 > 0.0 && !gm.essential.empty(), "psi needs a minimizer with non-empty I");
  PsiSpec spec;
  spec.t0 = gm.t0;
  spec.weakly_essential = gm.weakly_essential;
  const auto& I = gm.essential;
  const auto& K = gm.weakly_essential;
  if (K.empty()) return spec;
  const PdFactor s_ii(take(model.sigma, I, I));
  const Eigen::MatrixXd s_ki = take(model.sigma, K, I);
  spec.direction = (take(model.mu, K) - s_ki * s_ii.solve(take(model.mu, I))) / std::sqrt(gm.t0);
  const Eigen::MatrixXd s_ik = s_ki.transpose();
  spec.d_kk = take(model.sigma, K, K) - s_ki * s_ii.solve(s_ik);
  spec.d_kk = 0.5 * (spec.d_kk + spec.d_kk.transpose()).eval();
  return spec;
}

MvnResult psi(const PsiSpec& spec, double x, const MvnOptions& options) {
  if (spec.weakly_essential.empty()) return {1.0, 0.0};
  return mvn_survival(spec.d_kk, spec.direction * x, options);
}

CConstant c_constant(const GMinimum& gm, const RiskModel& model, const MvnOptions& options,
                     const DoublingPolicy& policy) {
  require(gm.gtilde > 0.0, "c_constant needs gtilde > 0");
  const PdFactor s_ii(take(model.sigma, gm.essential, gm.essential));
  CConstant out;
  const double m = static_cast<double>(gm.m);
  out.prefactor = std::exp(-0.5 * (m * std::log(2.0 * std::numbers::pi * gm.t0) + s_ii.log_determinant()));
  const double scale = 2.0 / std::sqrt(gm.gtilde);
  if (gm.weakly_essential.empty()) {
    out.integral = std::sqrt(std::numbers::pi);
  } else {
    const PsiSpec spec = make_psi_spec(gm, model);
    const WeightedIntegral w = integrate_gauss_hermite(
        [&](double y) {
          const MvnResult p = psi(spec, scale * y, options);
          return NoisyValue{p.value, p.std_error};
        },
        policy);
    out.integral = w.value;
    out.nodes = w.nodes;
    out.converged = w.converged;
  }
  out.value = out.prefactor * scale * out.integral;
  return out;
}

}  // namespace parisian
