#include "gpdistill/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gpdistill/errors.hpp"

namespace gpdistill {

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw InvalidArgument("gauss_hermite: need at least one node");
  // Symmetric Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(0.5 * k);
    jacobi(k - 1, k) = off;
    jacobi(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermiteRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = std::sqrt(std::numbers::pi) * solver.eigenvectors().row(0).transpose().array().square().matrix();
  // Symmetrize against eigensolver roundoff.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = w;
    rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return rule;
}

const GaussHermiteRule& gauss_hermite_32() {
  static const GaussHermiteRule rule = gauss_hermite(32);
  return rule;
}

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double expected_sigmoid(double mean, double variance) {
  const double sd = std::sqrt(std::max(variance, 0.0));
  if (sd == 0.0) return sigmoid(mean);
  const auto& rule = gauss_hermite_32();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights(i) * sigmoid(mean + std::numbers::sqrt2 * sd * rule.nodes(i));
  return acc / std::sqrt(std::numbers::pi);
}

}  // namespace gpdistill
