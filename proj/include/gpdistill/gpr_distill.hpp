#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gpdistill/gpr.hpp"
#include "gpdistill/kernel.hpp"
#include "gpdistill/posterior_chain.hpp"

namespace gpdistill {

// Per-step noise parameters. For the data-centric procedure gammas[s-1] is
// gamma_s (s = 1..T); for the distribution-centric procedure gammas[s] is
// gamma_s (s = 0..T-1).
struct DistillSchedule {
  std::vector<double> gammas;
  std::optional<double> mix_alpha;

  std::size_t steps() const { return gammas.size(); }
  void validate() const;

  // n evenly spaced values from first to last inclusive.
  static DistillSchedule linspace(double first, double last, std::size_t n);
  static DistillSchedule constant(double gamma, std::size_t n);
};

// gamma_minus = sum_{s<t} 1/gamma_s; `effective` = 1/gamma_minus is the noise
// of the single ordinary fit equivalent to t distribution-centric steps.
struct EffectiveNoise {
  double gamma_minus = 0.0;
  double effective = 0.0;
};

EffectiveNoise effective_noise(const DistillSchedule& schedule, std::size_t t);

// ---- data-centric -------------------------------------------------------

// y_1 .. y_T obtained by refitting on the previous step's mean at the
// training inputs. One fresh linear solve per step.
std::vector<Eigen::VectorXd> data_centric_targets_naive(const Dataset& data, const KernelParams& params,
                                                       const DistillSchedule& schedule);

// y_T via the eigendecomposition of the noiseless K. T = 0 returns y.
// Rejects schedules with mix_alpha.
Eigen::VectorXd data_centric_targets_fast(const SpectralDecomp& decomp, const Eigen::VectorXd& y,
                                          const DistillSchedule& schedule);

enum class DataCentricPath { naive, spectral };

// A fitted data-centric chain. predict(xs, t) is the step-t posterior given
// the step-(t-1) targets; its covariance depends only on gamma_t.
class DataCentricGpr {
 public:
  DataCentricGpr(const Dataset& data, const KernelParams& params, DistillSchedule schedule,
                 DataCentricPath path = DataCentricPath::spectral);

  std::size_t steps() const { return schedule_.steps(); }
  const DistillSchedule& schedule() const { return schedule_; }
  DataCentricPath path() const { return path_; }

  // Targets fitted at step t (t = 1 gives the observations, t = T+1 the final mean).
  Eigen::VectorXd targets(std::size_t t) const;
  Prediction predict(const Points& test_xs, std::size_t t) const;
  Eigen::VectorXd predict_mean(const Points& test_xs, std::size_t t) const;

 private:
  Dataset data_;
  KernelParams params_;
  DistillSchedule schedule_;
  DataCentricPath path_;
  std::shared_ptr<const SpectralDecomp> decomp_;
  std::vector<Eigen::VectorXd> naive_targets_;  // y_0 .. y_T, naive path only
};

// ---- distribution-centric ------------------------------------------------

// Literal recursion m_{t+1}, k_{t+1} from (m_t, k_t). Element s-1 of the
// result is the posterior after s steps (s = 1..t).
std::vector<PosteriorChain> distribution_centric_recursive(const Dataset& data, const KernelParams& params,
                                                           const DistillSchedule& schedule, std::size_t t);

// One ordinary fit with noise 1/gamma_minus.
GprModel distribution_centric_model(const Dataset& data, const KernelParams& params,
                                    const DistillSchedule& schedule, std::size_t t);

Prediction distribution_centric_closed_form(const Dataset& data, const KernelParams& params,
                                            const DistillSchedule& schedule, std::size_t t, const Points& test_xs);

// ---- replicated data ------------------------------------------------------

inline constexpr Eigen::Index kDefaultReplicationCap = 2000;

struct ReplicatedFit {
  Eigen::MatrixXd mean_blocks;  // N x t, column j is the posterior mean on copy j
  Eigen::MatrixXd cov;          // tN x tN
};

// Posterior of f at the training inputs after fitting t stacked copies of
// the data with noise gamma. Builds and solves the full tN system.
ReplicatedFit fit_replicated(const Dataset& data, const KernelParams& params, double noise, std::size_t t,
                             Eigen::Index cap = kDefaultReplicationCap);

}  // namespace gpdistill
