#pragma once

#include <functional>
#include <vector>

namespace parisian {

/// Nodes and weights for the weight function exp(-y^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule; safe to call from several threads.
const GaussHermiteRule& gauss_hermite(int n);

struct WeightedIntegral {
  double value = 0.0;
  int nodes = 0;
  bool converged = false;
  /// Difference between the last two node counts.
  double change = 0.0;
};

/// Sample of an integrand that may carry Monte Carlo noise.
struct NoisyValue {
  double value = 0.0;
  double std_error = 0.0;
};

struct DoublingPolicy {
  int first_nodes = 32;
  int max_nodes = 1024;
  double rel_tolerance = 1e-8;
};

/// Integral of exp(-y^2) f(y) over the real line with node counts doubled until
/// successive values agree within rel_tolerance, or within three standard errors
/// of the integrand noise when f is noisy.
WeightedIntegral integrate_gauss_hermite(const std::function<NoisyValue(double)>& f,
                                         const DoublingPolicy& policy = {});

}  // namespace parisian
