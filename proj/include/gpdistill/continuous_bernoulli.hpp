#pragma once

namespace gpdistill {

/// Normalizing constant C(lambda) of the continuous Bernoulli density
/// C(lambda) lambda^x (1-lambda)^(1-x) on [0, 1]. Throws InvalidArgument
/// unless 0 < lambda < 1.
double cb_normalizer(double lambda);

/// log C(sigmoid(a)) and its first two derivatives with respect to the
/// logit a. All three are smooth in a; a series expansion replaces the
/// hyperbolic closed forms for |a| < kCbSeriesCutoff.
struct CbTerms {
  double log_c = 0.0;
  double dlog_c = 0.0;
  double d2log_c = 0.0;
};

inline constexpr double kCbSeriesCutoff = 0.05;

CbTerms cb_terms_at_latent(double a);

/// log C(lambda) + x log(lambda) + (1-x) log(1-lambda), for x in [0, 1].
double cb_log_density(double x, double lambda);

/// Same density parameterized by the logit a = log(lambda / (1 - lambda));
/// stable for large |a|.
double cb_log_density_logit(double x, double a);

}  // namespace gpdistill
