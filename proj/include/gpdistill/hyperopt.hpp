#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpdistill/kernel.hpp"

namespace gpdistill {

enum class Objective { gpr_nll, gpc_bernoulli_nll, gpc_cb_nll };

const char* to_string(Objective o);
Objective parse_objective(const std::string& s);

// sigma_f is the kernel amplitude; the kernel's signal variance is sigma_f^2.
// For GPR the noise axis is the observation noise and is required; for the
// classifiers it is an optional diagonal regularizer.
struct GridSpec {
  std::vector<double> sigma_f_values;
  std::vector<double> length_scale_values;
  std::optional<std::vector<double>> noise_values;

  void validate() const;
  std::size_t size() const;

  static std::vector<double> log_spaced(double lo, double hi, std::size_t n);
  // 16 x 16 log-spaced over [1e-2, 1e2] on both kernel axes.
  static GridSpec default_grid();
};

struct GridCell {
  double sigma_f = 0.0;
  double length_scale = 0.0;
  std::optional<double> noise;
  double nll = std::numeric_limits<double>::infinity();  // +inf when the fit failed
  std::string failure;
};

struct GridResult {
  std::vector<GridCell> cells;  // sigma_f outermost, noise innermost
  std::size_t best_index = 0;

  const GridCell& best() const { return cells[best_index]; }
  KernelParams best_params(double jitter = kDefaultJitter) const;
};

// Negative log marginal likelihood of one cell. Throws on a failed fit.
double objective_value(const Points& xs, const Eigen::VectorXd& ys, const KernelParams& params,
                       std::optional<double> noise, Objective objective);

// Evaluates every cell. Ties in the minimum go to the smallest sigma_f, then
// the smallest length scale, then the smallest noise. Throws NumericalError
// if every cell fails.
GridResult grid_search(const Points& xs, const Eigen::VectorXd& ys, const GridSpec& grid, Objective objective,
                       double jitter = kDefaultJitter);

}  // namespace gpdistill
