#include "gpdistill/continuous_bernoulli.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpdistill/errors.hpp"

namespace gpdistill {

namespace {

// log(1 + e^a) without overflow.
double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

}  // namespace

double cb_normalizer(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("cb_normalizer: lambda must lie in (0, 1), got " + std::to_string(lambda));
  const double x = 1.0 - 2.0 * lambda;
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 2.0 + x2 * (2.0 / 3.0 + x2 * (2.0 / 5.0));
  }
  return 2.0 * std::atanh(x) / x;
}

CbTerms cb_terms_at_latent(double a) {
  CbTerms t;
  const double abs_a = std::abs(a);
  if (abs_a < kCbSeriesCutoff) {
    // Taylor expansions about 0; the next omitted terms are O(a^10).
    const double a2 = a * a;
    t.log_c = std::numbers::ln2 +
              a2 * (1.0 / 12.0 + a2 * (-7.0 / 1440.0 + a2 * (31.0 / 90720.0 + a2 * (-127.0 / 4838400.0))));
    t.dlog_c = a * (1.0 / 6.0 + a2 * (-7.0 / 360.0 + a2 * (31.0 / 15120.0 + a2 * (-127.0 / 604800.0))));
    t.d2log_c = 1.0 / 6.0 + a2 * (-7.0 / 120.0 + a2 * (31.0 / 3024.0 + a2 * (-127.0 / 86400.0)));
    return t;
  }
  // C(sigmoid(a)) = a coth(a/2) is even in a. coth(x/2) = 1 + 2/expm1(x).
  t.log_c = std::log(abs_a) + std::log1p(2.0 / std::expm1(abs_a));
  // 1/sinh and coth/sinh vanish (rather than overflow) for large |a|.
  const double inv_sinh = 1.0 / std::sinh(a);
  t.dlog_c = 1.0 / a - inv_sinh;
  t.d2log_c = -1.0 / (a * a) + inv_sinh / std::tanh(a);
  return t;
}

double cb_log_density(double x, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("cb_log_density: lambda must lie in (0, 1), got " + std::to_string(lambda));
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("cb_log_density: x must lie in [0, 1]");
  return std::log(cb_normalizer(lambda)) + x * std::log(lambda) + (1.0 - x) * std::log1p(-lambda);
}

double cb_log_density_logit(double x, double a) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("cb_log_density_logit: x must lie in [0, 1]");
  return x * a - softplus(a) + cb_terms_at_latent(a).log_c;
}

}  // namespace gpdistill
