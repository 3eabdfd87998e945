#pragma once

#include <Eigen/Dense>

namespace gpdistill {

// Gauss-Hermite rule for  integral f(x) exp(-x^2) dx ~ sum_i w_i f(x_i),
// computed by the Golub-Welsch eigenvalue method.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussHermiteRule gauss_hermite(int n);

// Cached 32-node rule.
const GaussHermiteRule& gauss_hermite_32();

double sigmoid(double a);

// E[sigmoid(z)] for z ~ N(mean, variance) with the 32-node rule.
double expected_sigmoid(double mean, double variance);

}  // namespace gpdistill
