#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "gpdistill/gpr.hpp"
#include "gpdistill/laplace.hpp"

namespace gpdistill {

// g(z) = z sin z
double toy_regression_function(double z);

// 10 equidistant inputs on [0, 10], y = g(x) + N(0, 1) noise.
Dataset regression_toy(std::uint64_t seed, bool noiseless = false, Eigen::Index n = 10);

// g(x) = 2 sin(x pi / 2)
double toy_classification_latent(double x);

struct ClassificationToy {
  BinaryDataset data;              // x ~ U(0, 5), y ~ Bernoulli(sigmoid(g(x)))
  Eigen::VectorXd probabilities;   // sigmoid(g(x)) at the same inputs
};

ClassificationToy classification_toy(std::uint64_t seed, Eigen::Index n);

}  // namespace gpdistill
