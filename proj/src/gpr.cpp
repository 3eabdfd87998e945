#include "gpdistill/gpr.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpdistill/errors.hpp"

namespace gpdistill {

void Dataset::validate() const {
  if (ys.size() == 0) throw InvalidArgument("dataset is empty");
  if (xs.rows() != ys.size())
    throw InvalidArgument("dataset has " + std::to_string(xs.rows()) + " inputs but " +
                          std::to_string(ys.size()) + " targets");
  if (xs.cols() == 0) throw InvalidArgument("dataset inputs have zero dimension");
}

MeanFunction zero_mean() {
  return [](const Points& xs) { return Eigen::VectorXd::Zero(xs.rows()); };
}

Eigen::VectorXd Prediction::lower() const {
  return mean - kZ975 * cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd Prediction::upper() const {
  return mean + kZ975 * cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

GprModel fit_gpr(const Dataset& data, const KernelParams& params, double noise, MeanFunction prior_mean) {
  data.validate();
  params.validate();
  auto decomp = std::make_shared<const SpectralDecomp>(spectral_decompose(gram(data.xs, params, false)));
  return fit_gpr(data, params, noise, std::move(decomp), std::move(prior_mean));
}

GprModel fit_gpr(const Dataset& data, const KernelParams& params, double noise,
                 std::shared_ptr<const SpectralDecomp> decomp, MeanFunction prior_mean) {
  data.validate();
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("noise must be non-negative");
  if (decomp->size() != data.size()) throw InvalidArgument("fit_gpr: decomposition size mismatch");

  const double lambda_max = decomp->eigenvalues(0);
  const double smallest = decomp->eigenvalues(decomp->size() - 1) + noise;
  if (!(smallest > 1e-14 * std::max(lambda_max + noise, 1.0)))
    throw SingularMatrix("fit_gpr: K + noise*I is singular (smallest eigenvalue " + std::to_string(smallest) + ")");

  GprModel m;
  m.train_xs_ = data.xs;
  m.params_ = params;
  m.noise_ = noise;
  m.prior_mean_ = prior_mean ? std::move(prior_mean) : zero_mean();
  m.decomp_ = std::move(decomp);

  const Eigen::VectorXd resid = data.ys - m.prior_mean_(data.xs);
  const Eigen::VectorXd proj = m.decomp_->eigenvectors.transpose() * resid;
  const Eigen::ArrayXd shifted = m.decomp_->eigenvalues.array() + noise;
  m.alpha_ = m.decomp_->eigenvectors * (proj.array() / shifted).matrix();

  const double n = static_cast<double>(data.size());
  m.log_marginal_ = -0.5 * (proj.array().square() / shifted).sum() - 0.5 * shifted.log().sum() -
                    0.5 * n * std::log(2.0 * std::numbers::pi);
  return m;
}

Eigen::VectorXd GprModel::predict_mean(const Points& test_xs) const {
  if (test_xs.cols() != train_xs_.cols()) throw InvalidArgument("predict: test dimension mismatch");
  return prior_mean_(test_xs) + cross_gram(test_xs, train_xs_, params_) * alpha_;
}

Prediction GprModel::predict(const Points& test_xs) const {
  if (test_xs.cols() != train_xs_.cols()) throw InvalidArgument("predict: test dimension mismatch");
  const Eigen::MatrixXd ks = cross_gram(test_xs, train_xs_, params_);
  Prediction p;
  p.mean = prior_mean_(test_xs) + ks * alpha_;

  // k* O diag((lambda + noise)^{-1/2})
  const Eigen::VectorXd scale = (decomp_->eigenvalues.array() + noise_).rsqrt().matrix();
  const Eigen::MatrixXd b = (ks * decomp_->eigenvectors) * scale.asDiagonal();
  p.cov = cross_gram(test_xs, test_xs, params_);
  p.cov.noalias() -= b * b.transpose();
  p.cov = 0.5 * (p.cov + p.cov.transpose()).eval();
  p.cov.diagonal() = p.cov.diagonal().cwiseMax(0.0);
  return p;
}

}  // namespace gpdistill
