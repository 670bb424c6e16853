#pragma once

#include "parisian/index_set.hpp"
#include "parisian/model.hpp"
#include "parisian/qp.hpp"

#include <Eigen/Dense>

namespace parisian {

struct GValue {
  double value = 0.0;
  QpSolution qp;
};

/// g(t) = (1/t) min_{x >= alpha + mu t} x^T Sigma^{-1} x.
GValue g_at(const RiskModel& model, double t);

/// Quadratic forms of a fixed support I: A = alpha_I' S^{-1} alpha_I,
/// C = alpha_I' S^{-1} mu_I, B = mu_I' S^{-1} mu_I with S = Sigma_II, so that
/// g_I(t) = A/t + 2C + B t.
struct SupportForms {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double stationary_time() const;
  double value(double t) const;
};

SupportForms support_forms(const RiskModel& model, const IndexSet& support);

struct GMinimum {
  double t0 = 0.0;
  Eigen::VectorXd b;
  IndexSet essential;
  IndexSet weakly_essential;
  IndexSet unessential;
  double ghat = 0.0;
  double gtilde = 0.0;
  int m = 0;
  /// Fixed-point and numeric minimizers disagree; t0 is the numeric one.
  bool degenerate = false;
  /// More than one support passes at t0 (boundary between regimes).
  bool boundary_tie = false;
  double t0_fixed_point = 0.0;
  double t0_numeric = 0.0;
};

/// Minimizes g over t > 0 by a fixed-point search over supports and by golden
/// section, and requires them to agree within 1e-8 (1 + t0).
GMinimum minimize_g(const RiskModel& model);

}  // namespace parisian
