#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gpdistill/kernel.hpp"

namespace gpdistill {

// A Gaussian process obtained by conditioning a zero-mean RBF prior on the
// same training inputs any number of times. Each step s stores
//   inner_s   : N x N matrix so that k_{s+1}(a,b) = k_s(a,b) - k_s(a,X) inner_s k_s(X,b)
//   weights_s : N-vector so that m_{s+1}(a) = m_s(a) + k_s(a,X) weights_s
// When a step conditions on noisy observations, inner_s = (K_s + noise*I)^{-1}
// and passing the noise lets the updates use noise * k_s(a,X) inner_s in place
// of the difference above, which loses digits once K_s dwarfs the noise.
// Depth zero is the prior itself. Evaluation walks the chain, so the cost of
// one evaluation grows linearly with depth.
class PosteriorChain {
 public:
  PosteriorChain(KernelParams base, Points train_xs);

  std::size_t depth() const { return steps_.size(); }
  const KernelParams& base() const { return base_; }
  const Points& train_xs() const { return train_xs_; }

  Eigen::VectorXd mean(const Points& xs) const;
  Eigen::MatrixXd covariance(const Points& a, const Points& b) const;
  Eigen::MatrixXd covariance(const Points& xs) const { return covariance(xs, xs); }

  // k_depth(X, X) and m_depth(X) at the training inputs (no jitter).
  const Eigen::MatrixXd& train_covariance() const { return train_cov_.back(); }
  const Eigen::VectorXd& train_mean() const { return train_mean_; }

  // The chain with one more conditioning step appended.
  PosteriorChain condition(Eigen::MatrixXd inner, Eigen::VectorXd weights,
                           std::optional<double> noise = std::nullopt) const;

  // The first `depth` steps of this chain.
  PosteriorChain prefix(std::size_t depth) const;

 private:
  struct Step {
    Eigen::MatrixXd inner;
    Eigen::VectorXd weights;
    std::optional<double> noise;
  };

  // k_s(xs, X) for s = 0 .. depth-1.
  std::vector<Eigen::MatrixXd> cross_chain(const Points& xs) const;

  KernelParams base_;
  Points train_xs_;
  std::vector<Step> steps_;
  std::vector<Eigen::MatrixXd> train_cov_;  // K_0 .. K_depth
  Eigen::VectorXd train_mean_;
};

}  // namespace gpdistill
