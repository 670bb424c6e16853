#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace parisian {

/// d-dimensional Brownian risk model U(t) = alpha*u + mu*t - A B(t), Sigma = A A^T.
struct RiskModel {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd mu;
  Eigen::VectorXd alpha;

  int dim() const { return static_cast<int>(mu.size()); }
};

/// Occupation budget r, capital scale u and an optional second budget r2 >= r.
struct RuinQuery {
  double r = 0.0;
  double u = 1.0;
  std::optional<double> r2;

  void check() const;
};

constexpr double kSymmetryTolerance = 1e-12;

/// Human-readable invariant violations; empty iff the model is usable.
std::vector<std::string> validate(const RiskModel& model);

/// Validates, symmetrizes sigma and returns the model. Throws parisian::Error
/// with a code specific to the first violation found.
RiskModel make_model(Eigen::MatrixXd sigma, Eigen::VectorXd mu, Eigen::VectorXd alpha);

/// Builds the model from a square nonsingular factor A with Sigma = A A^T.
RiskModel model_from_factor(const Eigen::MatrixXd& a, Eigen::VectorXd mu, Eigen::VectorXd alpha);

/// Two-line model with unit variances and correlation rho.
RiskModel two_line_model(double rho, Eigen::Vector2d mu, Eigen::Vector2d alpha);

RiskModel parse_model(const std::string& json_text);
RiskModel load_model(const std::filesystem::path& path);
std::string model_to_json(const RiskModel& model);
void save_model(const RiskModel& model, const std::filesystem::path& path);

}  // namespace parisian
