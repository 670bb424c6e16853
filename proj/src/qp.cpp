#include "parisian/qp.hpp"

#include "parisian/error.hpp"
#include "parisian/gaussian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>

namespace parisian {

namespace {

struct SupportCheck {
  bool passes = false;
  Eigen::VectorXd weights;
  Eigen::VectorXd solution;
};

SupportCheck check_support(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, const IndexSet& support) {
  const int d = static_cast<int>(b.size());
  const IndexSet rest = complement(support, d);
  SupportCheck out;
  const PdFactor factor(take(m, support, support));
  out.weights = factor.solve(take(b, support));
  const double weight_floor = -1e-12 * b.norm();
  if ((out.weights.array() <= weight_floor).any()) return out;
  out.solution = b;
  if (!rest.empty()) {
    const Eigen::VectorXd implied = take(m, rest, support) * out.weights;
    for (std::size_t k = 0; k < rest.size(); ++k) {
      const int j = rest[k];
      if (implied(k) < b(j) - 1e-12 * (1.0 + std::abs(b(j)))) return out;
      out.solution(j) = implied(k);
    }
  }
  out.passes = true;
  return out;
}

void check_inputs(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  if (m.rows() != m.cols() || m.rows() != b.size() || b.size() == 0)
    fail(ErrorCode::DimensionMismatch, "M must be d x d with d = len(b)");
  if (!b.allFinite() || !m.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite QP input");
  if (!(b.maxCoeff() > 0.0)) fail(ErrorCode::InvalidArgument, "b has no positive component");
  if (b.size() > 20) fail(ErrorCode::InvalidArgument, "support enumeration limited to d <= 20");
}

// Non-empty subsets of {0..d-1} ordered by size, then by mask value.
const std::vector<unsigned>& masks_by_size(int d) {
  static std::mutex mutex;
  static std::map<int, std::vector<unsigned>> cache;
  std::lock_guard lock(mutex);
  auto& masks = cache[d];
  if (masks.empty()) {
    for (unsigned mask = 1; mask < (1u << d); ++mask) masks.push_back(mask);
    std::stable_sort(masks.begin(), masks.end(),
                     [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
  }
  return masks;
}

}  // namespace

bool support_passes(const Eigen::MatrixXd& m, const Eigen::VectorXd& b, const IndexSet& support) {
  check_inputs(m, b);
  return check_support(m, b, support).passes;
}

QpSolution solve_pm(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  check_inputs(m, b);
  [[maybe_unused]] const PdFactor whole(m);
  const int d = static_cast<int>(b.size());

  QpSolution out;
  bool found = false;
  for (unsigned mask : masks_by_size(d)) {
    const IndexSet support = from_mask(mask, d);
    SupportCheck check = check_support(m, b, support);
    if (!check.passes) continue;
    out.passing_subsets.push_back(support);
    if (!found) {
      found = true;
      out.essential = support;
      out.solution = std::move(check.solution);
      out.value = take(b, support).dot(check.weights);
    }
  }
  if (!found) fail(ErrorCode::NoEssentialSet, "no index set satisfies the optimality conditions");
  out.degenerate = out.passing_subsets.size() > 1;
  IndexPartition parts = classify_indices(out.solution, b, out.essential);
  out.weakly_essential = std::move(parts.weakly_essential);
  out.unessential = std::move(parts.unessential);
  return out;
}

IndexPartition classify_indices(const Eigen::VectorXd& solution, const Eigen::VectorXd& b,
                                const IndexSet& essential, double tol) {
  require(solution.size() == b.size(), "solution and b sizes differ");
  IndexPartition parts;
  parts.essential = essential;
  for (int j : complement(essential, static_cast<int>(b.size()))) {
    if (std::abs(solution(j) - b(j)) <= tol * (1.0 + std::abs(b(j))))
      parts.weakly_essential.push_back(j);
    else
      parts.unessential.push_back(j);
  }
  return parts;
}

}  // namespace parisian
