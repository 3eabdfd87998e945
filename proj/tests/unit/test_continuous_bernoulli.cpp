#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gpdistill/continuous_bernoulli.hpp"
#include "gpdistill/errors.hpp"
#include "oracles.hpp"

using namespace gpdistill;

namespace {

// 1 / integral_0^1 lambda^x (1-lambda)^(1-x) dx
double normalizer_oracle(double lambda) {
  return 1.0 / oracle::integrate([&](double x) { return std::pow(lambda, x) * std::pow(1.0 - lambda, 1.0 - x); }, 0, 1);
}

double density_mass(double lambda) {
  return oracle::integrate([&](double x) { return std::exp(cb_log_density(x, lambda)); }, 0.0, 1.0);
}

}  // namespace

TEST(CbNormalizer, HalfGivesTwo) { EXPECT_EQ(cb_normalizer(0.5), 2.0); }

TEST(CbNormalizer, Symmetric) {
  for (double l : {0.01, 0.2, 0.4999, 0.73}) EXPECT_NEAR(cb_normalizer(l), cb_normalizer(1.0 - l), 1e-12 * cb_normalizer(l));
}

TEST(CbNormalizer, MatchesIntegralOracle) {
  EXPECT_NEAR(cb_normalizer(0.9), normalizer_oracle(0.9), 1e-8);
  for (double l : {0.5 + 1e-7, 0.5 - 3e-6, 0.05, 0.999}) EXPECT_NEAR(cb_normalizer(l), normalizer_oracle(l), 1e-8) << l;
}

TEST(CbNormalizer, RejectsBoundary) {
  for (double l : {0.0, 1.0, -0.2, 1.5, std::nan("")}) EXPECT_THROW(cb_normalizer(l), InvalidArgument);
}

TEST(CbTerms, ValuesAtZero) {
  const CbTerms t = cb_terms_at_latent(0.0);
  EXPECT_EQ(t.log_c, std::numbers::ln2);
  EXPECT_EQ(t.dlog_c, 0.0);
  EXPECT_EQ(t.d2log_c, 1.0 / 6.0);
  EXPECT_EQ(cb_normalizer(oracle::sigmoid(0.0)), 2.0);
}

TEST(CbTerms, NormalizerAtTwo) {
  const double c = std::exp(cb_terms_at_latent(2.0).log_c);
  EXPECT_NEAR(c, 2.0 * std::cosh(1.0) / std::sinh(1.0), 1e-13);
  EXPECT_NEAR(c, 2.6261, 5e-5);
  EXPECT_NEAR(c, normalizer_oracle(oracle::sigmoid(2.0)), 1e-8);
}

TEST(CbTerms, FirstDerivativeAtThree) {
  const double fd = oracle::derivative([](double a) { return cb_terms_at_latent(a).log_c; }, 3.0);
  EXPECT_NEAR(cb_terms_at_latent(3.0).dlog_c, fd, 1e-7);
}

TEST(CbTerms, LogCMatchesNormalizer) {
  oracle::Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-10, 10);
    EXPECT_NEAR(cb_terms_at_latent(a).log_c, std::log(normalizer_oracle(oracle::sigmoid(a))), 1e-8) << a;
  }
}

// 1 - sigmoid(a) is too coarse for the integral far out; C = a / tanh(a/2) there.
TEST(CbTerms, LogCLargeLatent) {
  for (double a : {12.0, 25.0, -29.0, 60.0, -300.0}) EXPECT_NEAR(cb_terms_at_latent(a).log_c, std::log(a / std::tanh(a / 2)), 1e-12) << a;
}

TEST(CbTermsProperty, DerivativesMatchFiniteDifferences) {
  oracle::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(-20, 20);
    const CbTerms t = cb_terms_at_latent(a);
    const double d1 = oracle::derivative([](double x) { return cb_terms_at_latent(x).log_c; }, a);
    const double d2 = oracle::derivative([](double x) { return cb_terms_at_latent(x).dlog_c; }, a);
    EXPECT_LE(std::abs(t.dlog_c - d1), 1e-6 * std::abs(t.dlog_c) + 1e-12) << a;
    EXPECT_LE(std::abs(t.d2log_c - d2), 1e-6 * std::abs(t.d2log_c) + 1e-12) << a;
  }
}

TEST(CbTermsProperty, SymmetryAndPositivity) {
  oracle::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-40, 40);
    const CbTerms p = cb_terms_at_latent(a), m = cb_terms_at_latent(-a);
    EXPECT_NEAR(p.log_c, m.log_c, 1e-12);
    EXPECT_NEAR(p.dlog_c, -m.dlog_c, 1e-12);
    EXPECT_NEAR(p.d2log_c, m.d2log_c, 1e-12);
    EXPECT_GT(p.log_c, 0.0);
    EXPECT_LE(p.d2log_c, 1.0 / 6.0 + 1e-15);
  }
}

// The second derivative is not positive everywhere: it tends to -1/a^2. What
// does hold is that the effective curvature sigma(1-sigma) - d2 log C is the
// variance of the distribution and therefore positive.
TEST(CbTermsProperty, EffectiveCurvatureIsVariance) {
  for (double a : {-25.0, -8.0, -3.0, -0.5, 0.0, 0.01, 0.7, 2.5, 6.0, 15.0}) {
    const double lambda = oracle::sigmoid(a);
    const double mean = oracle::integrate([&](double x) { return x * std::exp(cb_log_density_logit(x, a)); }, 0, 1);
    const double var =
        oracle::integrate([&](double x) { return (x - mean) * (x - mean) * std::exp(cb_log_density_logit(x, a)); }, 0, 1);
    const double w = lambda * (1.0 - lambda) - cb_terms_at_latent(a).d2log_c;
    EXPECT_GT(w, 0.0);
    EXPECT_NEAR(w, var, 1e-9 + 1e-7 * var) << a;
  }
  EXPECT_LT(cb_terms_at_latent(10.0).d2log_c, 0.0);
}

TEST(CbTermsProperty, BranchContinuity) {
  const CbTerms zero = cb_terms_at_latent(0.0);
  for (double a : {1e-5, -1e-5}) {
    const CbTerms t = cb_terms_at_latent(a);
    EXPECT_NEAR(t.log_c, zero.log_c, 1e-8);
    EXPECT_NEAR(t.dlog_c, a / 6.0, 1e-8);
    EXPECT_NEAR(t.d2log_c, zero.d2log_c, 1e-8);
  }
  const double c = kCbSeriesCutoff;
  const CbTerms below = cb_terms_at_latent(std::nextafter(c, 0.0)), above = cb_terms_at_latent(c);
  EXPECT_NEAR(below.log_c, above.log_c, 1e-14);
  EXPECT_NEAR(below.dlog_c, above.dlog_c, 1e-14);
  EXPECT_NEAR(below.d2log_c, above.d2log_c, 1e-12);
}

TEST(CbTerms, LargeLogitsStayFinite) {
  for (double a : {-900.0, 750.0, 1e6}) {
    const CbTerms t = cb_terms_at_latent(a);
    EXPECT_NEAR(t.log_c, std::log(std::abs(a)), 1e-12);
    EXPECT_TRUE(std::isfinite(t.dlog_c));
    EXPECT_TRUE(std::isfinite(t.d2log_c));
  }
}

TEST(CbDensity, UniformCase) { EXPECT_EQ(cb_log_density(0.5, 0.5), 0.0); }

TEST(CbDensity, IntegratesToOne) {
  for (double l : {0.1, 0.3, 0.7, 0.95}) EXPECT_NEAR(density_mass(l), 1.0, 1e-8) << l;
  oracle::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double l = rng.uniform(1e-3, 1 - 1e-3);
    EXPECT_NEAR(density_mass(l), 1.0, 1e-8) << l;
  }
}

TEST(CbDensity, BoundaryHandling) {
  EXPECT_THROW(cb_log_density(0.5, 0.0), InvalidArgument);
  EXPECT_THROW(cb_log_density(0.5, 1.0), InvalidArgument);
  EXPECT_THROW(cb_log_density(1.2, 0.5), InvalidArgument);
  EXPECT_NO_THROW(cb_log_density(0.0, 0.3));
  EXPECT_NO_THROW(cb_log_density(1.0, 0.3));
}

TEST(CbDensity, LogitFormAgrees) {
  oracle::Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-15, 15), x = rng.uniform(0, 1);
    EXPECT_NEAR(cb_log_density_logit(x, a), cb_log_density(x, oracle::sigmoid(a)), 1e-10);
  }
}

TEST(CbDensity, MaximumLikelihoodIsBiasedToExtremes) {
  for (double x : {0.6, 0.7, 0.9}) {
    const double best = oracle::argmax([&](double l) { return cb_log_density(x, l); }, 1e-6, 1 - 1e-6);
    EXPECT_GT(best, x + 0.01) << x;
  }
}
