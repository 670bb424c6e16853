#include "parisian/index_set.hpp"

#include <algorithm>

namespace parisian {

IndexSet complement(const IndexSet& set, int dim) {
  IndexSet out;
  for (int i = 0; i < dim; ++i)
    if (!std::binary_search(set.begin(), set.end(), i)) out.push_back(i);
  return out;
}

IndexSet from_mask(unsigned mask, int dim) {
  IndexSet out;
  for (int i = 0; i < dim; ++i)
    if (mask & (1u << i)) out.push_back(i);
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const IndexSet& rows) {
  Eigen::VectorXd out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out(i) = v(rows[i]);
  return out;
}

Eigen::MatrixXd take(const Eigen::MatrixXd& m, const IndexSet& rows, const IndexSet& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace parisian
