#include "parisian/model.hpp"

#include "parisian/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace parisian {

namespace {

using nlohmann::json;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

bool symmetric(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance;
}

// Cholesky pivots of the symmetric part must all be strictly positive.
bool positive_definite(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) return false;
  return (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all();
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::Schema, std::string(name) + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array()) fail(ErrorCode::Schema, std::string(name) + " rows must be arrays");
    if (cols == 0) cols = row.size();
    if (row.size() != cols || cols == 0)
      fail(ErrorCode::DimensionMismatch, std::string(name) + " is ragged");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      const auto& v = j[i][k];
      if (!v.is_number()) fail(ErrorCode::Schema, std::string(name) + " entries must be numbers");
      m(i, k) = v.get<double>();
    }
  if (!all_finite(m)) fail(ErrorCode::Parse, std::string(name) + " contains non-finite values");
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::Schema, std::string(name) + " must be a non-empty array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorCode::Schema, std::string(name) + " entries must be numbers");
    v(i) = j[i].get<double>();
  }
  if (!v.allFinite()) fail(ErrorCode::Parse, std::string(name) + " contains non-finite values");
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

void RuinQuery::check() const {
  require(std::isfinite(r) && r >= 0.0, "occupation budget r must be >= 0");
  require(std::isfinite(u) && u > 0.0, "capital scale u must be > 0");
  if (r2) require(std::isfinite(*r2) && *r2 >= r, "second budget r2 must be >= r");
}

std::vector<std::string> validate(const RiskModel& model) {
  std::vector<std::string> out;
  const auto d = model.mu.size();
  if (d == 0) {
    out.emplace_back("dimension must be positive");
    return out;
  }
  if (model.alpha.size() != d || model.sigma.rows() != d || model.sigma.cols() != d) {
    out.emplace_back("dimension mismatch between sigma, mu and alpha");
    return out;
  }
  if (!all_finite(model.sigma) || !model.mu.allFinite() || !model.alpha.allFinite())
    out.emplace_back("non-finite entries");
  if (!symmetric(model.sigma)) out.emplace_back("sigma not symmetric");
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(model.mu(i) > 0.0)) out.push_back("mu[" + std::to_string(i) + "] not > 0");
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(model.alpha(i) > 0.0)) out.push_back("alpha[" + std::to_string(i) + "] not > 0");
  if (all_finite(model.sigma) && !positive_definite(model.sigma))
    out.emplace_back("sigma not positive definite");
  return out;
}

RiskModel make_model(Eigen::MatrixXd sigma, Eigen::VectorXd mu, Eigen::VectorXd alpha) {
  const auto d = mu.size();
  if (d == 0) fail(ErrorCode::DimensionMismatch, "empty model");
  if (alpha.size() != d || sigma.rows() != d || sigma.cols() != d)
    fail(ErrorCode::DimensionMismatch, "sigma must be d x d with d = len(mu) = len(alpha)");
  if (!all_finite(sigma) || !mu.allFinite() || !alpha.allFinite())
    fail(ErrorCode::InvalidArgument, "model contains non-finite values");
  if (!symmetric(sigma)) fail(ErrorCode::NotSymmetric, "sigma not symmetric");
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(mu(i) > 0.0)) fail(ErrorCode::NonPositiveDrift, "mu[" + std::to_string(i) + "] not > 0");
  for (Eigen::Index i = 0; i < d; ++i)
    if (!(alpha(i) > 0.0)) fail(ErrorCode::NonPositiveAlpha, "alpha[" + std::to_string(i) + "] not > 0");
  if (!positive_definite(sigma)) fail(ErrorCode::NotPositiveDefinite, "sigma not positive definite");
  RiskModel model;
  model.sigma = 0.5 * (sigma + sigma.transpose());
  model.mu = std::move(mu);
  model.alpha = std::move(alpha);
  return model;
}

RiskModel model_from_factor(const Eigen::MatrixXd& a, Eigen::VectorXd mu, Eigen::VectorXd alpha) {
  if (a.rows() != a.cols()) fail(ErrorCode::DimensionMismatch, "factor A must be square");
  if (a.rows() != mu.size()) fail(ErrorCode::DimensionMismatch, "factor A must be d x d with d = len(mu)");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < a.rows()) fail(ErrorCode::SingularFactor, "factor A is singular");
  return make_model(a * a.transpose(), std::move(mu), std::move(alpha));
}

RiskModel two_line_model(double rho, Eigen::Vector2d mu, Eigen::Vector2d alpha) {
  Eigen::Matrix2d sigma;
  sigma << 1.0, rho, rho, 1.0;
  return make_model(sigma, mu, alpha);
}

RiskModel parse_model(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Schema, "model must be a JSON object");
  const bool has_sigma = j.contains("sigma");
  const bool has_a = j.contains("a");
  if (has_sigma && has_a) fail(ErrorCode::Schema, "give either \"sigma\" or \"a\", not both");
  if (!has_sigma && !has_a) fail(ErrorCode::Schema, "missing \"sigma\" (or factor \"a\")");
  if (!j.contains("mu")) fail(ErrorCode::Schema, "missing \"mu\"");
  if (!j.contains("alpha")) fail(ErrorCode::Schema, "missing \"alpha\"");

  Eigen::VectorXd mu = vector_from_json(j["mu"], "mu");
  Eigen::VectorXd alpha = vector_from_json(j["alpha"], "alpha");
  if (has_a) return model_from_factor(matrix_from_json(j["a"], "a"), std::move(mu), std::move(alpha));
  return make_model(matrix_from_json(j["sigma"], "sigma"), std::move(mu), std::move(alpha));
}

RiskModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open model file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model(text.str());
}

std::string model_to_json(const RiskModel& model) {
  json j;
  j["sigma"] = matrix_to_json(model.sigma);
  j["mu"] = vector_to_json(model.mu);
  j["alpha"] = vector_to_json(model.alpha);
  return j.dump(2);
}

void save_model(const RiskModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write model file " + path.string());
  out << model_to_json(model) << '\n';
}

}  // namespace parisian
