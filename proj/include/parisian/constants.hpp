#pragma once

#include "parisian/g_minimizer.hpp"
#include "parisian/gaussian.hpp"
#include "parisian/model.hpp"
#include "parisian/quadrature.hpp"

#include <Eigen/Dense>

namespace parisian {

/// psi(x) = P{Y_K > direction x} for Y_K ~ N(0, d_kk); identically 1 when K is empty.
struct PsiSpec {
  double t0 = 0.0;
  IndexSet weakly_essential;
  /// (mu_K - Sigma_KI Sigma_II^{-1} mu_I) / sqrt(t0)
  Eigen::VectorXd direction;
  /// Schur complement Sigma_KK - Sigma_KI Sigma_II^{-1} Sigma_IK.
  Eigen::MatrixXd d_kk;
};

PsiSpec make_psi_spec(const GMinimum& gm, const RiskModel& model);

MvnResult psi(const PsiSpec& spec, double x, const MvnOptions& options = {});

struct CConstant {
  double value = 0.0;
  /// Integral of exp(-y^2) psi(2y / sqrt(gtilde)) over the real line.
  double integral = 0.0;
  /// 1 / sqrt((2 pi t0)^m |Sigma_II|)
  double prefactor = 0.0;
  int nodes = 0;
  bool converged = true;
};

CConstant c_constant(const GMinimum& gm, const RiskModel& model, const MvnOptions& options = {},
                     const DoublingPolicy& policy = {});

}  // namespace parisian
