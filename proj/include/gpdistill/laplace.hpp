#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gpdistill/gpr.hpp"
#include "gpdistill/kernel.hpp"
#include "gpdistill/posterior_chain.hpp"

namespace gpdistill {

// Targets in [0, 1]. Ordinary classification uses {0, 1}; distillation
// steps fit continuous targets.
struct BinaryDataset {
  Points xs;
  Eigen::VectorXd ys;

  Eigen::Index size() const { return ys.size(); }
  bool strictly_binary() const;
  void validate() const;
};

enum class Likelihood { bernoulli, continuous_bernoulli };
enum class ProbabilityMethod { latent_mean, quadrature };

const char* to_string(Likelihood l);
const char* to_string(ProbabilityMethod m);

struct NewtonOptions {
  int max_iters = 100;
  double step_tol = 1e-10;  // infinity norm of the change in f
  double grad_tol = 1e-8;   // Euclidean norm of the log-posterior gradient
  int max_halvings = 30;
};

struct LaplaceFit {
  Eigen::VectorXd f_hat;
  // Effective curvature of the negative log-likelihood, sigma(1-sigma) minus
  // d2 log C for the continuous Bernoulli.
  Eigen::VectorXd w_diag;
  // y - sigma(f_hat) + d log C; equals K^{-1}(f_hat - m) at the mode.
  Eigen::VectorXd weights;
  Eigen::VectorXd prior_mean_at_train;
  Eigen::MatrixXd chol_lower;  // L L^T = I + W^{1/2} K W^{1/2}
  Likelihood likelihood = Likelihood::bernoulli;
  int iterations = 0;
  int halvings = 0;
  bool converged = false;
  double psi = 0.0;  // log p(y|f_hat) - 1/2 (f_hat - m)^T K^{-1} (f_hat - m)
  double grad_norm = 0.0;
  std::vector<double> psi_trace;  // psi at the start and after every iteration
};

// log p(y | f) summed over points.
double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& f, Likelihood likelihood);

// psi(f) and its gradient, evaluated directly with a factorization of K.
// Reference implementations for checking the Newton solver.
double log_posterior(const Eigen::VectorXd& y, const Eigen::MatrixXd& k, const Eigen::VectorXd& m,
                     const Eigen::VectorXd& f, Likelihood likelihood);
Eigen::VectorXd log_posterior_gradient(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                                       const Eigen::VectorXd& m, const Eigen::VectorXd& f, Likelihood likelihood);

// Newton-Raphson for the posterior mode, organized so that neither K^{-1}
// nor W^{-1} is formed. `k` already contains any jitter or regularization.
LaplaceFit laplace_mode(const Eigen::VectorXd& targets, const Eigen::MatrixXd& k,
                        const Eigen::VectorXd& prior_mean, Likelihood likelihood, const NewtonOptions& opts = {});

// Laplace approximation to log p(y):
//   psi(f_hat) - 1/2 log|K| - 1/2 log|W + K^{-1}|   (Gaussian prior normalizer included)
double laplace_marginal_loglik(const LaplaceFit& fit, const Eigen::VectorXd& targets);

// Class probability from the latent marginal N(mean, variance).
double class_probability(double mean, double variance, ProbabilityMethod method);

// A Laplace-approximated GP classifier. The prior is any PosteriorChain, so
// the same type serves ordinary fits, scaled-prior fits, and steps of the
// distribution-centric recursion.
class GpcModel {
 public:
  GpcModel(PosteriorChain prior, Eigen::VectorXd targets, Likelihood likelihood, double diag_shift,
           const NewtonOptions& opts = {});

  const PosteriorChain& prior() const { return prior_; }
  const LaplaceFit& fit() const { return fit_; }
  const Eigen::VectorXd& targets() const { return targets_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  double diag_shift() const { return diag_shift_; }

  Prediction predict_latent(const Points& test_xs) const;
  // Latent mean and marginal variance only.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_marginals(const Points& test_xs) const;
  Eigen::VectorXd predict_proba(const Points& test_xs, ProbabilityMethod method) const;

  double marginal_loglik() const { return laplace_marginal_loglik(fit_, targets_); }

  // The approximate posterior GP, usable as the prior of a further step.
  PosteriorChain posterior() const;

 private:
  PosteriorChain prior_;
  Eigen::VectorXd targets_;
  Eigen::MatrixXd gram_;
  double diag_shift_;
  LaplaceFit fit_;
};

// Ordinary classifier with prior GP(0, k); the Gram diagonal gets
// params.jitter + reg_gamma.
GpcModel fit_gpc(const BinaryDataset& data, const KernelParams& params, Likelihood likelihood,
                 double reg_gamma = 0.0, const NewtonOptions& opts = {});

}  // namespace gpdistill
