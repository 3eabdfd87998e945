#include "gpdistill/gpc_distill.hpp"

#include <algorithm>
#include <cmath>

#include "gpdistill/errors.hpp"

namespace gpdistill {

const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::soft_mean: return "soft_mean";
    case TargetKind::latent_sigmoid: return "latent_sigmoid";
    case TargetKind::hard_threshold: return "hard_threshold";
  }
  return "?";
}

TargetKind parse_target_kind(const std::string& s) {
  if (s == "soft_mean" || s == "soft-mean") return TargetKind::soft_mean;
  if (s == "latent_sigmoid" || s == "latent-sigmoid") return TargetKind::latent_sigmoid;
  if (s == "hard_threshold" || s == "hard-threshold") return TargetKind::hard_threshold;
  throw InvalidArgument("unknown target kind '" + s + "'");
}

void GpcDistillConfig::validate() const {
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (reg_gammas) {
    if (reg_gammas->size() != static_cast<std::size_t>(steps))
      throw InvalidArgument("reg_gammas has " + std::to_string(reg_gammas->size()) + " entries for " +
                            std::to_string(steps) + " steps");
    for (double g : *reg_gammas)
      if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidArgument("reg_gammas must be finite and non-negative");
  }
}

double GpcDistillConfig::reg_gamma(int step) const {
  return reg_gammas ? (*reg_gammas)[static_cast<std::size_t>(step - 1)] : 0.0;
}

Eigen::VectorXd distill_targets(const GpcModel& model, TargetKind kind) {
  const Points& xs = model.prior().train_xs();
  switch (kind) {
    case TargetKind::latent_sigmoid:
      return model.predict_proba(xs, ProbabilityMethod::latent_mean);
    case TargetKind::soft_mean:
      return model.predict_proba(xs, ProbabilityMethod::quadrature);
    case TargetKind::hard_threshold: {
      const Eigen::VectorXd p = model.predict_proba(xs, ProbabilityMethod::quadrature);
      return (p.array() >= 0.5).cast<double>().matrix();
    }
  }
  throw InvalidArgument("unknown target kind");
}

DataCentricGpcResult data_centric_gpc(const BinaryDataset& data, const KernelParams& params,
                                      const GpcDistillConfig& config) {
  data.validate();
  params.validate();
  config.validate();
  if (!data.strictly_binary()) throw InvalidArgument("data_centric_gpc: step-1 targets must be binary");

  DataCentricGpcResult out;
  Eigen::VectorXd targets = data.ys;
  for (int s = 1; s <= config.steps; ++s) {
    const Likelihood lik = s == 1 ? Likelihood::bernoulli : config.distill_likelihood;
    try {
      out.models.emplace_back(PosteriorChain(params, data.xs), targets, lik,
                              params.jitter + config.reg_gamma(s), config.newton);
    } catch (const NumericalError&) {
      rethrow_with_step(s);
    }
    out.targets.push_back(targets);
    if (s < config.steps) targets = distill_targets(out.models.back(), config.target_kind);
  }
  return out;
}

std::vector<GpcModel> distribution_centric_gpc_iterated(const BinaryDataset& data, const KernelParams& params,
                                                        int steps, const NewtonOptions& opts) {
  data.validate();
  params.validate();
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  std::vector<GpcModel> models;
  models.reserve(static_cast<std::size_t>(steps));
  PosteriorChain prior(params, data.xs);
  for (int s = 1; s <= steps; ++s) {
    try {
      models.emplace_back(prior, data.ys, Likelihood::bernoulli, params.jitter, opts);
    } catch (const NumericalError&) {
      rethrow_with_step(s);
    }
    if (s < steps) prior = models.back().posterior();
  }
  return models;
}

GpcModel distribution_centric_gpc_scaled(const BinaryDataset& data, const KernelParams& params, int t,
                                         const NewtonOptions& opts) {
  if (t < 1) throw InvalidArgument("t must be at least 1");
  return fit_gpc(data, params.scaled(static_cast<double>(t)), Likelihood::bernoulli, 0.0, opts);
}

LaplaceFit fit_replicated_gpc(const BinaryDataset& data, const KernelParams& params, int t,
                              const NewtonOptions& opts) {
  data.validate();
  params.validate();
  if (t < 1) throw InvalidArgument("t must be at least 1");
  const Eigen::Index n = data.size();
  Points xs(n * t, data.xs.cols());
  Eigen::VectorXd ys(n * t);
  for (int j = 0; j < t; ++j) {
    xs.middleRows(j * n, n) = data.xs;
    ys.segment(j * n, n) = data.ys;
  }
  const Eigen::MatrixXd k = gram(xs, params, true).values;
  return laplace_mode(ys, k, Eigen::VectorXd::Zero(n * t), Likelihood::bernoulli, opts);
}

std::vector<double> approximation_error(const std::vector<GpcModel>& iterated, const std::vector<GpcModel>& scaled,
                                        const Points& test_xs, ProbabilityMethod method) {
  if (iterated.size() != scaled.size()) throw InvalidArgument("approximation_error: step counts differ");
  std::vector<double> out;
  out.reserve(iterated.size());
  for (std::size_t s = 0; s < iterated.size(); ++s) {
    const Eigen::VectorXd d = iterated[s].predict_proba(test_xs, method) - scaled[s].predict_proba(test_xs, method);
    out.push_back(d.squaredNorm() / static_cast<double>(d.size()));
  }
  return out;
}

double log_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  if (y.size() != p.size() || y.size() == 0) throw InvalidArgument("log_loss: size mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double pi = std::clamp(p(i), 1e-300, 1.0 - 1e-16);
    acc -= y(i) * std::log(pi) + (1.0 - y(i)) * std::log1p(-pi);
  }
  return acc / static_cast<double>(y.size());
}

}  // namespace gpdistill
