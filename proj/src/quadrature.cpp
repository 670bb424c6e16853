#include "parisian/quadrature.hpp"

#include "parisian/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace parisian {

namespace {

// Eigenvalues of the Jacobi matrix seed a Newton polish on the orthonormal
// Hermite recurrence. The recurrence is rescaled as it runs so that large node
// counts do not overflow; weights below the double range become 0.
GaussHermiteRule build_rule(int n) {
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi;
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& start = jacobi.eigenvalues();

  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = start(n - 1 - i);
    double log_scale = 0.0;
    double pp = 0.0;
    for (int iter = 0; iter < 20; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      log_scale = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
        if (std::abs(p1) > 1e150) {
          p1 *= 1e-150;
          p2 *= 1e-150;
          log_scale += 150.0 * std::numbers::ln10;
        }
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (2 * i + 1 == n) z = 0.0;
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    const double log_w = std::log(2.0) - 2.0 * (std::log(std::abs(pp)) + log_scale);
    rule.weights[i] = std::exp(log_w);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  require(n >= 1, "Gauss-Hermite rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(n));
  return *slot;
}

WeightedIntegral integrate_gauss_hermite(const std::function<NoisyValue(double)>& f,
                                         const DoublingPolicy& policy) {
  WeightedIntegral out;
  double previous = 0.0;
  bool have_previous = false;
  for (int n = policy.first_nodes; n <= policy.max_nodes; n *= 2) {
    const auto& rule = gauss_hermite(n);
    double sum = 0.0;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      if (rule.weights[i] == 0.0) continue;
      const NoisyValue v = f(rule.nodes[i]);
      sum += rule.weights[i] * v.value;
      var += rule.weights[i] * rule.weights[i] * v.std_error * v.std_error;
    }
    out.value = sum;
    out.nodes = n;
    if (have_previous) {
      out.change = std::abs(sum - previous);
      const double noise = 3.0 * std::sqrt(var);
      if (out.change <= policy.rel_tolerance * std::abs(sum) || (noise > 0.0 && out.change <= noise)) {
        out.converged = true;
        return out;
      }
    }
    previous = sum;
    have_previous = true;
  }
  return out;
}

}  // namespace parisian
