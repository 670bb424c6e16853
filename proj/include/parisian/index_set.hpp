#pragma once

#include <Eigen/Dense>

#include <vector>

namespace parisian {

/// Sorted, zero-based coordinate indices.
using IndexSet = std::vector<int>;

IndexSet complement(const IndexSet& set, int dim);

/// Subset encoded by the bits of `mask` (bit i set means coordinate i is included).
IndexSet from_mask(unsigned mask, int dim);

Eigen::VectorXd take(const Eigen::VectorXd& v, const IndexSet& rows);
Eigen::MatrixXd take(const Eigen::MatrixXd& m, const IndexSet& rows, const IndexSet& cols);

}  // namespace parisian
