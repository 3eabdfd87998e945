#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpdistill/laplace.hpp"

namespace gpdistill {

// How the targets of step t+1 are read off the step-t model at the
// training inputs.
enum class TargetKind {
  soft_mean,       // E_q[sigmoid(f)], by quadrature over the latent marginal
  latent_sigmoid,  // sigmoid(f_hat)
  hard_threshold,  // soft_mean thresholded at 0.5
};

const char* to_string(TargetKind k);
TargetKind parse_target_kind(const std::string& s);

struct GpcDistillConfig {
  int steps = 1;
  TargetKind target_kind = TargetKind::soft_mean;
  // Added to the Gram diagonal at each step, on top of the kernel jitter.
  std::optional<std::vector<double>> reg_gammas;
  // Likelihood of steps >= 2. Bernoulli here gives the misspecified model.
  Likelihood distill_likelihood = Likelihood::continuous_bernoulli;
  NewtonOptions newton;

  void validate() const;
  double reg_gamma(int step) const;  // 1-based
};

// Step targets for the next refit.
Eigen::VectorXd distill_targets(const GpcModel& model, TargetKind kind);

struct DataCentricGpcResult {
  std::vector<GpcModel> models;          // one per step
  std::vector<Eigen::VectorXd> targets;  // the targets each step was fitted to
};

// Step 1 is an ordinary Bernoulli fit to binary labels; step t >= 2 is fitted
// to the step t-1 predictions at the training inputs.
DataCentricGpcResult data_centric_gpc(const BinaryDataset& data, const KernelParams& params,
                                      const GpcDistillConfig& config);

// Each step refits the binary labels under the previous step's Laplace
// posterior as prior. W is re-estimated at every step's own mode.
std::vector<GpcModel> distribution_centric_gpc_iterated(const BinaryDataset& data, const KernelParams& params,
                                                        int steps, const NewtonOptions& opts = {});

// One fit under the prior GP(0, t k); identical to fitting t copies of the data.
GpcModel distribution_centric_gpc_scaled(const BinaryDataset& data, const KernelParams& params, int t,
                                         const NewtonOptions& opts = {});

// Brute force: t stacked copies of the data under GP(0, k). Returns f_hat for
// the stacked set (tN entries).
LaplaceFit fit_replicated_gpc(const BinaryDataset& data, const KernelParams& params, int t,
                              const NewtonOptions& opts = {});

// Per-step MSE of predicted probabilities between the iterated chain and the
// scaled fit with the same step count.
std::vector<double> approximation_error(const std::vector<GpcModel>& iterated, const std::vector<GpcModel>& scaled,
                                        const Points& test_xs, ProbabilityMethod method);

// Mean binary cross-entropy of probabilities p against targets y.
double log_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& p);

}  // namespace gpdistill
