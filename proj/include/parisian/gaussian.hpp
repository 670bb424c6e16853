#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace parisian {

/// Standard normal distribution function Phi.
double phi_cdf(double s);

/// Standard normal survival function Psi = 1 - Phi, accurate in the upper tail.
double phi_survival(double s);

/// Phi^{-1}(p) for p in (0, 1).
double normal_quantile(double p);

/// Cholesky factor of a positive definite matrix.
class PdFactor {
 public:
  explicit PdFactor(const Eigen::MatrixXd& matrix);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& lower() const { return lower_; }
  double log_determinant() const { return log_det_; }
  double determinant() const;
  int size() const { return static_cast<int>(matrix_.rows()); }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd lower_;
  double log_det_ = 0.0;
};

struct MvnOptions {
  std::uint64_t seed = 0x9d2c5680u;
  /// Absolute target for randomized evaluations; <= 0 picks 1e-6 for k <= 3
  /// and 1e-4 above.
  double abs_tolerance = 0.0;
  int shifts = 12;
  int min_points = 1 << 9;
  int max_points = 1 << 18;
};

struct MvnResult {
  double value = 0.0;
  /// Standard error of randomized evaluations; zero for the deterministic paths.
  double std_error = 0.0;
};

/// P{Y > threshold} componentwise for Y ~ N(0, cov).
MvnResult mvn_survival(const Eigen::MatrixXd& cov, const Eigen::VectorXd& threshold,
                       const MvnOptions& options = {});

/// The separation-of-variables lattice estimator used for k >= 3, callable at any k.
MvnResult mvn_survival_sov(const Eigen::MatrixXd& cov, const Eigen::VectorXd& threshold,
                           const MvnOptions& options = {});

/// P{X > h, Y > k} for standard normals with correlation rho.
double bivariate_survival(double h, double k, double rho);

}  // namespace parisian
