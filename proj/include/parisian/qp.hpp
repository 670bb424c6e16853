#pragma once

#include "parisian/index_set.hpp"

#include <Eigen/Dense>

#include <vector>

namespace parisian {

/// Relative tolerance deciding whether an off-support coordinate touches its bound.
constexpr double kTieTolerance = 1e-9;

/// Minimizer of x^T M^{-1} x over {x >= b} with its index partition.
struct QpSolution {
  Eigen::VectorXd solution;
  IndexSet essential;
  IndexSet weakly_essential;
  IndexSet unessential;
  double value = 0.0;
  /// Every subset that satisfied both optimality conditions, smallest first.
  std::vector<IndexSet> passing_subsets;
  /// True when more than one subset passed (a tie between candidate supports).
  bool degenerate = false;
};

struct IndexPartition {
  IndexSet essential;
  IndexSet weakly_essential;
  IndexSet unessential;
};

/// Solves the quadratic program by enumerating supports in increasing size.
/// Throws InvalidArgument when no component of b is positive, NotPositiveDefinite
/// for an invalid M and NoEssentialSet when no support passes.
QpSolution solve_pm(const Eigen::MatrixXd& m, const Eigen::VectorXd& b);

/// True when `support` satisfies both optimality conditions for (M, b).
bool support_passes(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, const IndexSet& support);

/// Splits the complement of `essential` into ties (|x_j - b_j| <= tol (1 + |b_j|)) and the rest.
IndexPartition classify_indices(const Eigen::VectorXd& solution, const Eigen::VectorXd& b,
                                const IndexSet& essential, double tol = kTieTolerance);

}  // namespace parisian
