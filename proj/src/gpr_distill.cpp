#include "gpdistill/gpr_distill.hpp"

#include <cmath>
#include <string>

#include "gpdistill/errors.hpp"

namespace gpdistill {

void DistillSchedule::validate() const {
  if (gammas.empty()) throw InvalidArgument("distillation schedule is empty");
  for (double g : gammas)
    if (!(g > 0.0) || !std::isfinite(g))
      throw InvalidArgument("schedule gammas must be positive, got " + std::to_string(g));
  if (mix_alpha && !(*mix_alpha > 0.0 && *mix_alpha < 1.0))
    throw InvalidArgument("mix_alpha must lie strictly inside (0, 1)");
}

DistillSchedule DistillSchedule::linspace(double first, double last, std::size_t n) {
  DistillSchedule s;
  s.gammas.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.gammas[i] = n == 1 ? first : first + (last - first) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) s.gammas.back() = last;
  return s;
}

DistillSchedule DistillSchedule::constant(double gamma, std::size_t n) {
  DistillSchedule s;
  s.gammas.assign(n, gamma);
  return s;
}

EffectiveNoise effective_noise(const DistillSchedule& schedule, std::size_t t) {
  if (t == 0) throw InvalidArgument("effective_noise: t must be at least 1");
  if (t > schedule.steps())
    throw InvalidArgument("effective_noise: t = " + std::to_string(t) + " exceeds schedule length " +
                          std::to_string(schedule.steps()));
  EffectiveNoise e;
  for (std::size_t s = 0; s < t; ++s) {
    const double g = schedule.gammas[s];
    if (!(g > 0.0)) throw InvalidArgument("schedule gammas must be positive");
    e.gamma_minus += 1.0 / g;
  }
  e.effective = 1.0 / e.gamma_minus;
  return e;
}

std::vector<Eigen::VectorXd> data_centric_targets_naive(const Dataset& data, const KernelParams& params,
                                                       const DistillSchedule& schedule) {
  data.validate();
  schedule.validate();
  const Eigen::MatrixXd k = gram(data.xs, params, false).values;
  const Eigen::Index n = data.size();

  std::vector<Eigen::VectorXd> out;
  out.reserve(schedule.steps());
  Eigen::VectorXd prev = data.ys;
  for (std::size_t s = 0; s < schedule.steps(); ++s) {
    Eigen::VectorXd train = prev;
    if (schedule.mix_alpha && s > 0) train = *schedule.mix_alpha * data.ys + (1.0 - *schedule.mix_alpha) * prev;
    Eigen::LLT<Eigen::MatrixXd> llt(k + schedule.gammas[s] * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success) {
      SingularMatrix err("data_centric_targets_naive: K + gamma*I is not positive definite");
      err.step = static_cast<int>(s + 1);
      throw err;
    }
    prev = k * llt.solve(train);
    out.push_back(prev);
  }
  return out;
}

Eigen::VectorXd data_centric_targets_fast(const SpectralDecomp& decomp, const Eigen::VectorXd& y,
                                          const DistillSchedule& schedule) {
  if (schedule.mix_alpha) throw InvalidArgument("the spectral path does not support mix_alpha");
  for (double g : schedule.gammas)
    if (!(g > 0.0)) throw InvalidArgument("schedule gammas must be positive");
  if (y.size() != decomp.size()) throw InvalidArgument("data_centric_targets_fast: size mismatch");

  const Eigen::ArrayXd& d = decomp.eigenvalues.array();
  Eigen::ArrayXd shrink = Eigen::ArrayXd::Ones(d.size());
  for (double g : schedule.gammas) shrink *= d / (d + g);
  return decomp.eigenvectors * (shrink * (decomp.eigenvectors.transpose() * y).array()).matrix();
}

DataCentricGpr::DataCentricGpr(const Dataset& data, const KernelParams& params, DistillSchedule schedule,
                               DataCentricPath path)
    : data_(data), params_(params), schedule_(std::move(schedule)), path_(path) {
  data_.validate();
  params_.validate();
  schedule_.validate();
  if (path_ == DataCentricPath::spectral) {
    if (schedule_.mix_alpha) throw InvalidArgument("the spectral path does not support mix_alpha");
    decomp_ = std::make_shared<const SpectralDecomp>(spectral_decompose(gram(data_.xs, params_, false)));
  } else {
    naive_targets_.push_back(data_.ys);
    auto steps = data_centric_targets_naive(data_, params_, schedule_);
    naive_targets_.insert(naive_targets_.end(), steps.begin(), steps.end());
  }
}

Eigen::VectorXd DataCentricGpr::targets(std::size_t t) const {
  if (t == 0 || t > schedule_.steps() + 1) throw InvalidArgument("DataCentricGpr::targets: step out of range");
  if (path_ == DataCentricPath::naive) {
    const Eigen::VectorXd& prev = naive_targets_[t - 1];
    if (schedule_.mix_alpha && t > 1) return *schedule_.mix_alpha * data_.ys + (1.0 - *schedule_.mix_alpha) * prev;
    return prev;
  }
  DistillSchedule head;
  head.gammas.assign(schedule_.gammas.begin(), schedule_.gammas.begin() + static_cast<std::ptrdiff_t>(t - 1));
  return data_centric_targets_fast(*decomp_, data_.ys, head);
}

Prediction DataCentricGpr::predict(const Points& test_xs, std::size_t t) const {
  if (t == 0 || t > schedule_.steps()) throw InvalidArgument("DataCentricGpr::predict: step out of range");
  const double gamma = schedule_.gammas[t - 1];
  Dataset step{data_.xs, targets(t)};
  if (path_ == DataCentricPath::spectral) return fit_gpr(step, params_, gamma, decomp_).predict(test_xs);
  return fit_gpr(step, params_, gamma).predict(test_xs);
}

Eigen::VectorXd DataCentricGpr::predict_mean(const Points& test_xs, std::size_t t) const {
  if (t == 0 || t > schedule_.steps()) throw InvalidArgument("DataCentricGpr::predict: step out of range");
  if (path_ == DataCentricPath::naive) return predict(test_xs, t).mean;
  // k* O diag(prod_{s<t} d/(d+g_s) * 1/(d+g_t)) O^T y
  const Eigen::ArrayXd& d = decomp_->eigenvalues.array();
  Eigen::ArrayXd coef = (d + schedule_.gammas[t - 1]).inverse();
  for (std::size_t s = 0; s + 1 < t; ++s) coef *= d / (d + schedule_.gammas[s]);
  const Eigen::VectorXd w =
      decomp_->eigenvectors * (coef * (decomp_->eigenvectors.transpose() * data_.ys).array()).matrix();
  return cross_gram(test_xs, data_.xs, params_) * w;
}

std::vector<PosteriorChain> distribution_centric_recursive(const Dataset& data, const KernelParams& params,
                                                           const DistillSchedule& schedule, std::size_t t) {
  data.validate();
  schedule.validate();
  if (t == 0 || t > schedule.steps())
    throw InvalidArgument("distribution_centric_recursive: t must be in [1, schedule length]");
  const Eigen::Index n = data.size();
  std::vector<PosteriorChain> out;
  out.reserve(t);
  PosteriorChain current(params, data.xs);
  // y - m_s(X), carried as gamma * weights so it does not cancel
  Eigen::VectorXd residual = data.ys;
  for (std::size_t s = 0; s < t; ++s) {
    Eigen::MatrixXd shifted = current.train_covariance();
    shifted.diagonal().array() += schedule.gammas[s];
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) {
      SingularMatrix err("distribution_centric_recursive: K_t + gamma_t*I is not positive definite");
      err.step = static_cast<int>(s + 1);
      throw err;
    }
    Eigen::MatrixXd inner = llt.solve(Eigen::MatrixXd::Identity(n, n));
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::VectorXd weights = llt.solve(residual);
    residual = schedule.gammas[s] * weights;
    current = current.condition(std::move(inner), std::move(weights), schedule.gammas[s]);
    out.push_back(current);
  }
  return out;
}

GprModel distribution_centric_model(const Dataset& data, const KernelParams& params,
                                    const DistillSchedule& schedule, std::size_t t) {
  schedule.validate();
  return fit_gpr(data, params, effective_noise(schedule, t).effective);
}

Prediction distribution_centric_closed_form(const Dataset& data, const KernelParams& params,
                                            const DistillSchedule& schedule, std::size_t t, const Points& test_xs) {
  return distribution_centric_model(data, params, schedule, t).predict(test_xs);
}

ReplicatedFit fit_replicated(const Dataset& data, const KernelParams& params, double noise, std::size_t t,
                             Eigen::Index cap) {
  data.validate();
  if (t == 0) throw InvalidArgument("fit_replicated: t must be at least 1");
  if (!(noise > 0.0)) throw InvalidArgument("fit_replicated: noise must be positive");
  const Eigen::Index n = data.size();
  const Eigen::Index reps = static_cast<Eigen::Index>(t);
  const Eigen::Index total = n * reps;
  if (total > cap)
    throw InvalidArgument("fit_replicated: " + std::to_string(total) + " rows exceed the cap of " +
                          std::to_string(cap));

  Points xs(total, data.dim());
  Eigen::VectorXd ys(total);
  for (Eigen::Index j = 0; j < reps; ++j) {
    xs.middleRows(j * n, n) = data.xs;
    ys.segment(j * n, n) = data.ys;
  }
  const Eigen::MatrixXd k = gram(xs, params, false).values;
  Eigen::LLT<Eigen::MatrixXd> llt(k + noise * Eigen::MatrixXd::Identity(total, total));
  if (llt.info() != Eigen::Success) throw SingularMatrix("fit_replicated: system is not positive definite");

  ReplicatedFit out;
  const Eigen::VectorXd mean = k * llt.solve(ys);
  out.mean_blocks = Eigen::Map<const Eigen::MatrixXd>(mean.data(), n, reps);
  out.cov = k - k * llt.solve(k);
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace gpdistill
