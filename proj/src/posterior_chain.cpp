#include "gpdistill/posterior_chain.hpp"

#include "gpdistill/errors.hpp"

namespace gpdistill {

PosteriorChain::PosteriorChain(KernelParams base, Points train_xs)
    : base_(base), train_xs_(std::move(train_xs)) {
  base_.validate();
  if (train_xs_.rows() == 0) throw InvalidArgument("PosteriorChain: no training inputs");
  train_cov_.push_back(gram(train_xs_, base_, false).values);
  train_mean_ = Eigen::VectorXd::Zero(train_xs_.rows());
}

std::vector<Eigen::MatrixXd> PosteriorChain::cross_chain(const Points& xs) const {
  std::vector<Eigen::MatrixXd> chain;
  chain.reserve(steps_.size());
  if (steps_.empty()) return chain;
  chain.push_back(cross_gram(xs, train_xs_, base_));
  for (std::size_t s = 0; s + 1 < steps_.size(); ++s) {
    const Eigen::MatrixXd& ks = chain.back();
    if (steps_[s].noise)
      chain.push_back(*steps_[s].noise * (ks * steps_[s].inner));
    else
      chain.push_back(ks - (ks * steps_[s].inner) * train_cov_[s]);
  }
  return chain;
}

Eigen::VectorXd PosteriorChain::mean(const Points& xs) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(xs.rows());
  const auto chain = cross_chain(xs);
  for (std::size_t s = 0; s < steps_.size(); ++s) m += chain[s] * steps_[s].weights;
  return m;
}

Eigen::MatrixXd PosteriorChain::covariance(const Points& a, const Points& b) const {
  Eigen::MatrixXd k = cross_gram(a, b, base_);
  if (steps_.empty()) return k;
  const auto ca = cross_chain(a);
  const bool same = &a == &b;
  const auto cb = same ? std::vector<Eigen::MatrixXd>{} : cross_chain(b);
  for (std::size_t s = 0; s < steps_.size(); ++s) {
    const Eigen::MatrixXd& rb = same ? ca[s] : cb[s];
    k.noalias() -= ca[s] * steps_[s].inner * rb.transpose();
  }
  return k;
}

PosteriorChain PosteriorChain::condition(Eigen::MatrixXd inner, Eigen::VectorXd weights,
                                         std::optional<double> noise) const {
  const Eigen::Index n = train_xs_.rows();
  if (inner.rows() != n || inner.cols() != n || weights.size() != n)
    throw InvalidArgument("PosteriorChain::condition: size mismatch");
  PosteriorChain next = *this;
  const Eigen::MatrixXd& k = train_cov_.back();
  next.train_mean_ = train_mean_ + k * weights;
  Eigen::MatrixXd k_next = noise ? Eigen::MatrixXd(*noise * (k * inner)) : Eigen::MatrixXd(k - k * inner * k);
  k_next = 0.5 * (k_next + k_next.transpose()).eval();
  next.train_cov_.push_back(std::move(k_next));
  next.steps_.push_back({std::move(inner), std::move(weights), noise});
  return next;
}

PosteriorChain PosteriorChain::prefix(std::size_t depth) const {
  if (depth > steps_.size()) throw InvalidArgument("PosteriorChain::prefix: depth exceeds chain");
  PosteriorChain out(base_, train_xs_);
  for (std::size_t s = 0; s < depth; ++s) out = out.condition(steps_[s].inner, steps_[s].weights, steps_[s].noise);
  return out;
}

}  // namespace gpdistill
