#include "gpdistill/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "gpdistill/errors.hpp"
#include "gpdistill/gpc_distill.hpp"
#include "gpdistill/gpr_distill.hpp"
#include "gpdistill/toy_data.hpp"

namespace gpdistill {

const std::vector<std::string>& bench_methods() {
  static const std::vector<std::string> m{"gpr-data-naive", "gpr-data-fast",   "gpr-dist",         "gpr-dist-recursive",
                                          "gpc-data",       "gpc-dist-scaled", "gpc-dist-iterated"};
  return m;
}

const BenchSlope& BenchResult::slope(const std::string& method) const {
  for (const auto& s : slopes)
    if (s.method == method) return s;
  throw InvalidArgument("no benchmark slope for '" + method + "'");
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

using Clock = std::chrono::steady_clock;

double sink = 0.0;

double time_loop(const std::function<double()>& op, int inner) {
  const auto start = Clock::now();
  double acc = 0.0;
  for (int i = 0; i < inner; ++i) acc += op();
  const auto stop = Clock::now();
  sink += acc;
  return std::chrono::duration<double>(stop - start).count() / inner;
}

int calibrate(const std::function<double()>& op, double min_seconds) {
  int inner = 1;
  for (;;) {
    const double per = time_loop(op, inner);
    if (per * inner >= min_seconds || inner >= (1 << 20)) return inner;
    inner = per > 0.0 ? std::max(inner * 2, static_cast<int>(std::ceil(1.2 * min_seconds / per))) : inner * 2;
  }
}

}  // namespace

BenchResult bench_fit_scaling(const BenchConfig& config) {
  if (config.steps.empty() || config.repetitions < 1 || config.n < 2)
    throw InvalidArgument("bench: need steps, repetitions >= 1 and n >= 2");
  for (int t : config.steps)
    if (t < 1) throw InvalidArgument("bench: step counts must be positive");
  std::vector<std::string> methods = config.methods.empty() ? bench_methods() : config.methods;
  for (const auto& m : methods)
    if (std::find(bench_methods().begin(), bench_methods().end(), m) == bench_methods().end())
      throw InvalidArgument("bench: unknown method '" + m + "'");

  const Dataset reg = regression_toy(config.seed, false, config.n);
  const KernelParams reg_params{25.0, 1.0, kDefaultJitter};
  const BinaryDataset cls = classification_toy(config.seed, config.n).data;
  const KernelParams cls_params{1.0, 1.0, kDefaultJitter};
  const Points test = linspace_points(0.0, 10.0, 20);
  const Points cls_test = linspace_points(-2.0, 7.0, 20);
  const double gamma = 0.1;

  auto gpr_baseline = [&] { return fit_gpr(reg, reg_params, gamma).predict_mean(test).sum(); };
  auto gpc_baseline = [&] {
    return fit_gpc(cls, cls_params, Likelihood::bernoulli).predict_proba(cls_test, ProbabilityMethod::quadrature).sum();
  };

  auto make_op = [&](const std::string& method, int t) -> std::function<double()> {
    const DistillSchedule sched = DistillSchedule::constant(gamma, static_cast<std::size_t>(t));
    if (method == "gpr-data-naive")
      return [&, sched, t] {
        DistillSchedule head = sched;
        head.gammas.resize(static_cast<std::size_t>(t - 1));
        Eigen::VectorXd y = reg.ys;
        if (t > 1) y = data_centric_targets_naive(reg, reg_params, head).back();
        return fit_gpr(Dataset{reg.xs, y}, reg_params, gamma).predict_mean(test).sum();
      };
    if (method == "gpr-data-fast")
      return [&, sched, t] {
        return DataCentricGpr(reg, reg_params, sched, DataCentricPath::spectral)
            .predict_mean(test, static_cast<std::size_t>(t))
            .sum();
      };
    if (method == "gpr-dist")
      return [&, sched, t] {
        return distribution_centric_model(reg, reg_params, sched, static_cast<std::size_t>(t)).predict_mean(test).sum();
      };
    if (method == "gpr-dist-recursive")
      return [&, sched, t] {
        return distribution_centric_recursive(reg, reg_params, sched, static_cast<std::size_t>(t)).back().mean(test).sum();
      };
    if (method == "gpc-data")
      return [&, t] {
        GpcDistillConfig cfg;
        cfg.steps = t;
        return data_centric_gpc(cls, cls_params, cfg).models.back().predict_proba(cls_test, ProbabilityMethod::quadrature).sum();
      };
    if (method == "gpc-dist-scaled")
      return [&, t] {
        return distribution_centric_gpc_scaled(cls, cls_params, t)
            .predict_proba(cls_test, ProbabilityMethod::quadrature)
            .sum();
      };
    return [&, t] {
      return distribution_centric_gpc_iterated(cls, cls_params, t)
          .back()
          .predict_proba(cls_test, ProbabilityMethod::quadrature)
          .sum();
    };
  };

  BenchResult result;
  const int gpr_inner = calibrate(gpr_baseline, config.min_sample_seconds);
  const int gpc_inner = calibrate(gpc_baseline, config.min_sample_seconds);

  std::map<std::pair<std::string, int>, std::vector<double>> samples;
  std::vector<double> gpr_base_times;
  std::vector<double> gpc_base_times;
  for (int r = 0; r < config.repetitions; ++r) {
    for (const auto& method : methods) {
      const bool is_gpc = method.rfind("gpc", 0) == 0;
      const auto& baseline = is_gpc ? std::function<double()>(gpc_baseline) : std::function<double()>(gpr_baseline);
      const int inner = is_gpc ? gpc_inner : gpr_inner;
      for (int t : config.steps) {
        const auto op = make_op(method, t);
        // Baseline and method are timed back to back so that slow drift in
        // machine load cancels in the ratio.
        const double base = time_loop(baseline, inner);
        const double cost = time_loop(op, inner);
        (is_gpc ? gpc_base_times : gpr_base_times).push_back(base);
        samples[{method, t}].push_back(cost / base);
      }
    }
  }

  for (const auto& method : methods) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int t : config.steps) {
      const auto& v = samples[{method, t}];
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      result.rows.push_back(BenchRow{method, t, mean, empirical_quantile(v, 0.1), empirical_quantile(v, 0.9)});
      xs.push_back(t);
      ys.push_back(mean);
    }
    BenchSlope s{method, 0.0, ys.front()};
    if (xs.size() > 1) {
      const double n = static_cast<double>(xs.size());
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
      }
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      s.slope = sxx > 0.0 ? sxy / sxx : 0.0;
      s.intercept = my - s.slope * mx;
    }
    result.slopes.push_back(s);
  }
  if (!gpr_base_times.empty()) result.gpr_baseline_seconds = empirical_quantile(gpr_base_times, 0.5);
  if (!gpc_base_times.empty()) result.gpc_baseline_seconds = empirical_quantile(gpc_base_times, 0.5);
  return result;
}

}  // namespace gpdistill
