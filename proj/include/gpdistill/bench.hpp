#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpdistill {

// Relative fit time of each distillation method against the library's own
// single ordinary fit (GPR or Laplace GPC) on the same data.
struct BenchConfig {
  std::vector<int> steps{1, 5, 10, 20};
  int repetitions = 30;
  Eigen::Index n = 50;
  std::uint64_t seed = 0;
  // Each timing sample repeats the operation until the baseline takes at
  // least this long.
  double min_sample_seconds = 2e-3;
  std::vector<std::string> methods;  // empty = all of bench_methods()
};

// gpr-data-naive, gpr-data-fast, gpr-dist, gpr-dist-recursive,
// gpc-data, gpc-dist-scaled, gpc-dist-iterated
const std::vector<std::string>& bench_methods();

struct BenchRow {
  std::string method;
  int steps = 0;
  double mean = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct BenchSlope {
  std::string method;
  double slope = 0.0;  // least squares of mean relative time on steps
  double intercept = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSlope> slopes;
  double gpr_baseline_seconds = 0.0;
  double gpc_baseline_seconds = 0.0;

  const BenchSlope& slope(const std::string& method) const;
};

BenchResult bench_fit_scaling(const BenchConfig& config);

// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double q);

}  // namespace gpdistill
