#pragma once

#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "gpdistill/kernel.hpp"

namespace gpdistill {

struct Dataset {
  Points xs;
  Eigen::VectorXd ys;

  Eigen::Index size() const { return ys.size(); }
  Eigen::Index dim() const { return xs.cols(); }
  void validate() const;
};

// Prior mean evaluated on a batch of points.
using MeanFunction = std::function<Eigen::VectorXd(const Points&)>;

MeanFunction zero_mean();

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  // Gaussian 2.5 / 97.5 percentiles of each marginal.
  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;
};

inline constexpr double kZ975 = 1.959963984540054;

// Ordinary GP regression posterior. Solves go through the spectral
// decomposition of the noiseless Gram matrix so the factorization can be
// shared with the distillation paths.
class GprModel {
 public:
  const Points& train_xs() const { return train_xs_; }
  const Eigen::VectorXd& alpha_weights() const { return alpha_; }
  const KernelParams& params() const { return params_; }
  double noise() const { return noise_; }
  const SpectralDecomp& decomposition() const { return *decomp_; }

  Prediction predict(const Points& test_xs) const;
  Eigen::VectorXd predict_mean(const Points& test_xs) const;

  // log N(y | m(X), K + noise*I)
  double log_marginal_likelihood() const { return log_marginal_; }

 private:
  friend GprModel fit_gpr(const Dataset&, const KernelParams&, double, MeanFunction);
  friend GprModel fit_gpr(const Dataset&, const KernelParams&, double, std::shared_ptr<const SpectralDecomp>,
                          MeanFunction);

  Points train_xs_;
  Eigen::VectorXd alpha_;
  KernelParams params_;
  double noise_ = 0.0;
  MeanFunction prior_mean_;
  std::shared_ptr<const SpectralDecomp> decomp_;
  double log_marginal_ = 0.0;
};

// Throws SingularMatrix when K + noise*I is numerically singular (only
// possible with noise = 0 and degenerate inputs).
GprModel fit_gpr(const Dataset& data, const KernelParams& params, double noise,
                 MeanFunction prior_mean = zero_mean());

// Same, reusing a decomposition of the noiseless training Gram matrix.
GprModel fit_gpr(const Dataset& data, const KernelParams& params, double noise,
                 std::shared_ptr<const SpectralDecomp> decomp, MeanFunction prior_mean = zero_mean());

}  // namespace gpdistill
