#include "gpdistill/toy_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gpdistill/errors.hpp"
#include "gpdistill/quadrature.hpp"

namespace gpdistill {

double toy_regression_function(double z) { return z * std::sin(z); }

Dataset regression_toy(std::uint64_t seed, bool noiseless, Eigen::Index n) {
  if (n < 1) throw InvalidArgument("regression_toy: n must be positive");
  Dataset d;
  d.xs = linspace_points(0.0, 10.0, n);
  d.ys.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.ys(i) = toy_regression_function(d.xs(i, 0));
    if (!noiseless) d.ys(i) += noise(rng);
  }
  return d;
}

double toy_classification_latent(double x) { return 2.0 * std::sin(x * std::numbers::pi / 2.0); }

ClassificationToy classification_toy(std::uint64_t seed, Eigen::Index n) {
  if (n < 1) throw InvalidArgument("classification_toy: n must be positive");
  ClassificationToy t;
  t.data.xs.resize(n, 1);
  t.data.ys.resize(n);
  t.probabilities.resize(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = unif(rng);
    const double p = sigmoid(toy_classification_latent(x));
    t.data.xs(i, 0) = x;
    t.probabilities(i) = p;
    t.data.ys(i) = coin(rng) < p ? 1.0 : 0.0;
  }
  return t;
}

}  // namespace gpdistill
