#include "parisian/gaussian.hpp"

#include "parisian/error.hpp"
#include "parisian/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace parisian {

double phi_cdf(double s) { return 0.5 * std::erfc(-s / std::numbers::sqrt2); }

double phi_survival(double s) { return 0.5 * std::erfc(s / std::numbers::sqrt2); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile needs p in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

PdFactor::PdFactor(const Eigen::MatrixXd& matrix) : matrix_(matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "PdFactor needs a non-empty square matrix");
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
  lower_ = llt.matrixL();
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    if (!(lower_(i, i) > 0.0)) fail(ErrorCode::NotPositiveDefinite, "non-positive Cholesky pivot");
    log_det_ += 2.0 * std::log(lower_(i, i));
  }
}

double PdFactor::determinant() const { return std::exp(log_det_); }

Eigen::VectorXd PdFactor::solve(const Eigen::VectorXd& rhs) const {
  const auto l = lower_.triangularView<Eigen::Lower>();
  return l.transpose().solve(l.solve(rhs));
}

Eigen::MatrixXd PdFactor::solve(const Eigen::MatrixXd& rhs) const {
  const auto l = lower_.triangularView<Eigen::Lower>();
  return l.transpose().solve(l.solve(rhs));
}

double bivariate_survival(double h, double k, double rho) {
  require(std::abs(rho) < 1.0, "correlation must lie in (-1,1)");
  const double independent = phi_survival(h) * phi_survival(k);
  if (rho == 0.0) return independent;
  // d/d(rho) of the orthant probability is the bivariate density; with
  // rho = sin(theta) the integrand stays bounded as |rho| -> 1.
  auto integrand = [h, k](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return std::exp(-(h * h + k * k - 2.0 * h * k * s) / (2.0 * c * c));
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double integral = Rule::integrate(integrand, 0.0, std::asin(rho), 20, 1e-14);
  const double p = independent + integral / (2.0 * std::numbers::pi);
  return std::clamp(p, 0.0, 1.0);
}

namespace {

constexpr std::array<int, 48> kPrimes = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,
                                         41,  43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,
                                         97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
                                         157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223};

double default_tolerance(int k) { return k <= 3 ? 1e-6 : 1e-4; }

// Genz's sequential conditioning for P{Z <= upper}, Z ~ N(0, L L^T); `w` holds k-1 uniforms.
double sov_integrand(const Eigen::MatrixXd& l, const Eigen::VectorXd& upper, const double* w,
                     std::vector<double>& y) {
  const int k = static_cast<int>(upper.size());
  double e = phi_cdf(upper(0) / l(0, 0));
  double f = e;
  for (int i = 1; i < k; ++i) {
    if (f <= 0.0) return 0.0;
    const double p = std::clamp(w[i - 1] * e, 1e-300, 1.0 - 1e-16);
    y[i - 1] = normal_quantile(p);
    double shift = 0.0;
    for (int j = 0; j < i; ++j) shift += l(i, j) * y[j];
    e = phi_cdf((upper(i) - shift) / l(i, i));
    f *= e;
  }
  return f;
}

}  // namespace

MvnResult mvn_survival_sov(const Eigen::MatrixXd& cov, const Eigen::VectorXd& threshold,
                           const MvnOptions& options) {
  const int k = static_cast<int>(threshold.size());
  require(k >= 1 && cov.rows() == k && cov.cols() == k, "covariance and threshold sizes differ");
  require(k - 1 <= static_cast<int>(kPrimes.size()), "dimension too large for the lattice rule");
  const PdFactor factor(cov);
  // P{Y > a} = P{Y < -a} by symmetry of the centred Gaussian.
  const Eigen::VectorXd upper = -threshold;
  if (k == 1) return {phi_cdf(upper(0) / factor.lower()(0, 0)), 0.0};

  const double tol = options.abs_tolerance > 0.0 ? options.abs_tolerance : default_tolerance(k);
  const int dims = k - 1;
  std::vector<double> gen(dims);
  for (int i = 0; i < dims; ++i) {
    const double s = std::sqrt(static_cast<double>(kPrimes[i]));
    gen[i] = s - std::floor(s);
  }
  Engine rng(splitmix64(options.seed));
  std::vector<std::vector<double>> shifts(options.shifts, std::vector<double>(dims));
  for (auto& shift : shifts)
    for (auto& v : shift) v = open_uniform(rng);

  std::vector<double> w(dims);
  std::vector<double> y(dims);
  MvnResult result;
  for (int n = options.min_points;; n *= 2) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& shift : shifts) {
      double acc = 0.0;
      for (int j = 1; j <= n; ++j) {
        for (int i = 0; i < dims; ++i) {
          double x = j * gen[i] + shift[i];
          x -= std::floor(x);
          w[i] = std::abs(2.0 * x - 1.0);
        }
        acc += sov_integrand(factor.lower(), upper, w.data(), y);
      }
      acc /= n;
      sum += acc;
      sum_sq += acc * acc;
    }
    const double m = static_cast<double>(shifts.size());
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq / m - mean * mean) * m / (m - 1.0));
    result = {std::clamp(mean, 0.0, 1.0), std::sqrt(var / m)};
    if (3.0 * result.std_error <= tol || 2 * n > options.max_points) break;
  }
  return result;
}

MvnResult mvn_survival(const Eigen::MatrixXd& cov, const Eigen::VectorXd& threshold,
                       const MvnOptions& options) {
  const int k = static_cast<int>(threshold.size());
  require(k >= 1 && cov.rows() == k && cov.cols() == k, "covariance and threshold sizes differ");
  if (k == 1) {
    if (!(cov(0, 0) > 0.0)) fail(ErrorCode::NotPositiveDefinite, "variance must be positive");
    return {phi_survival(threshold(0) / std::sqrt(cov(0, 0))), 0.0};
  }
  if (k == 2) {
    PdFactor check(cov);
    const double s1 = std::sqrt(cov(0, 0));
    const double s2 = std::sqrt(cov(1, 1));
    return {bivariate_survival(threshold(0) / s1, threshold(1) / s2, cov(0, 1) / (s1 * s2)), 0.0};
  }
  return mvn_survival_sov(cov, threshold, options);
}

}  // namespace parisian
