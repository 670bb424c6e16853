#pragma once

// Reference minimizers of x' M^{-1} x over {x >= b} that share no code with solve_pm.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace oracle {

// Every face {x_A = b_A} of the feasible cone has a single stationary point of
// the quadratic. The global minimizer is the feasible one with the lowest value.
inline double face_minimum(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  const int d = static_cast<int>(b.size());
  const Eigen::MatrixXd q = m.inverse();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned fixed = 1; fixed < (1u << d); ++fixed) {
    Eigen::VectorXd x = b;
    std::vector<int> free_idx;
    std::vector<int> fixed_idx;
    for (int i = 0; i < d; ++i) ((fixed >> i) & 1u ? fixed_idx : free_idx).push_back(i);
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      const int na = static_cast<int>(fixed_idx.size());
      Eigen::MatrixXd qff(nf, nf);
      Eigen::MatrixXd qfa(nf, na);
      Eigen::VectorXd ba(na);
      for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j) qff(i, j) = q(free_idx[i], free_idx[j]);
        for (int j = 0; j < na; ++j) qfa(i, j) = q(free_idx[i], fixed_idx[j]);
      }
      for (int j = 0; j < na; ++j) ba(j) = b(fixed_idx[j]);
      const Eigen::VectorXd xf = -qff.ldlt().solve(qfa * ba);
      bool feasible = true;
      for (int i = 0; i < nf; ++i) {
        if (xf(i) < b(free_idx[i]) - 1e-12 * (1 + std::abs(b(free_idx[i])))) feasible = false;
        x(free_idx[i]) = xf(i);
      }
      if (!feasible) continue;
    }
    best = std::min(best, x.dot(q * x));
  }
  return best;
}

// Accelerated projected gradient on the same problem.
inline double projected_gradient_minimum(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                                         int iterations = 20000) {
  const Eigen::MatrixXd q = m.inverse();
  const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
  Eigen::VectorXd x = b.cwiseMax(0.0);
  Eigen::VectorXd y = x;
  double tk = 1.0;
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd next = (y - (2.0 / lipschitz) * (q * y)).cwiseMax(b);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    y = next + ((tk - 1.0) / tn) * (next - x);
    x = next;
    tk = tn;
  }
  return x.dot(q * x);
}

struct Instance {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
};

inline Instance random_instance(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = z(rng);
  Instance out;
  out.m = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
  out.b.resize(d);
  do {
    for (int i = 0; i < d; ++i) out.b(i) = z(rng);
  } while (out.b.maxCoeff() <= 0.0);
  return out;
}

}  // namespace oracle
