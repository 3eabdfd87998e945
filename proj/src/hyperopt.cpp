#include "gpdistill/hyperopt.hpp"

#include <cmath>
#include <tuple>

#include "gpdistill/errors.hpp"
#include "gpdistill/gpr.hpp"
#include "gpdistill/laplace.hpp"

namespace gpdistill {

const char* to_string(Objective o) {
  switch (o) {
    case Objective::gpr_nll: return "gpr_nll";
    case Objective::gpc_bernoulli_nll: return "gpc_bernoulli_nll";
    case Objective::gpc_cb_nll: return "gpc_cb_nll";
  }
  return "?";
}

Objective parse_objective(const std::string& s) {
  if (s == "gpr_nll" || s == "gpr") return Objective::gpr_nll;
  if (s == "gpc_bernoulli_nll" || s == "gpc-bernoulli" || s == "bernoulli") return Objective::gpc_bernoulli_nll;
  if (s == "gpc_cb_nll" || s == "gpc-cb" || s == "cb") return Objective::gpc_cb_nll;
  throw InvalidArgument("unknown objective '" + s + "'");
}

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw InvalidArgument(std::string("grid axis ") + name + " is empty");
  for (double v : axis)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("grid axis ") + name + " must be positive");
}

}  // namespace

void GridSpec::validate() const {
  check_axis(sigma_f_values, "sigma_f");
  check_axis(length_scale_values, "length_scale");
  if (noise_values) check_axis(*noise_values, "noise");
}

std::size_t GridSpec::size() const {
  return sigma_f_values.size() * length_scale_values.size() * (noise_values ? noise_values->size() : 1);
}

std::vector<double> GridSpec::log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) throw InvalidArgument("log_spaced needs 0 < lo <= hi and n >= 1");
  std::vector<double> v(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return v;
}

GridSpec GridSpec::default_grid() {
  return GridSpec{log_spaced(1e-2, 1e2, 16), log_spaced(1e-2, 1e2, 16), std::nullopt};
}

KernelParams GridResult::best_params(double jitter) const {
  const GridCell& c = best();
  return KernelParams{c.sigma_f * c.sigma_f, c.length_scale, jitter};
}

double objective_value(const Points& xs, const Eigen::VectorXd& ys, const KernelParams& params,
                       std::optional<double> noise, Objective objective) {
  switch (objective) {
    case Objective::gpr_nll: {
      if (!noise) throw InvalidArgument("gpr_nll needs a noise value");
      return -fit_gpr(Dataset{xs, ys}, params, *noise).log_marginal_likelihood();
    }
    case Objective::gpc_bernoulli_nll:
    case Objective::gpc_cb_nll: {
      const Likelihood lik =
          objective == Objective::gpc_cb_nll ? Likelihood::continuous_bernoulli : Likelihood::bernoulli;
      return -fit_gpc(BinaryDataset{xs, ys}, params, lik, noise.value_or(0.0)).marginal_loglik();
    }
  }
  throw InvalidArgument("unknown objective");
}

GridResult grid_search(const Points& xs, const Eigen::VectorXd& ys, const GridSpec& grid, Objective objective,
                       double jitter) {
  grid.validate();
  if (objective == Objective::gpr_nll && !grid.noise_values)
    throw InvalidArgument("grid search with gpr_nll needs a noise axis");
  const std::vector<std::optional<double>> noises = [&] {
    std::vector<std::optional<double>> v;
    if (grid.noise_values)
      for (double g : *grid.noise_values) v.emplace_back(g);
    else
      v.emplace_back(std::nullopt);
    return v;
  }();

  GridResult result;
  result.cells.reserve(grid.size());
  for (double sf : grid.sigma_f_values) {
    for (double l : grid.length_scale_values) {
      for (const auto& g : noises) {
        GridCell cell{sf, l, g, std::numeric_limits<double>::infinity(), {}};
        try {
          const double v = objective_value(xs, ys, KernelParams{sf * sf, l, jitter}, g, objective);
          if (std::isfinite(v))
            cell.nll = v;
          else
            cell.failure = "non-finite objective";
        } catch (const NumericalError& e) {
          cell.failure = e.what();
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }

  auto key = [](const GridCell& c) { return std::make_tuple(c.nll, c.sigma_f, c.length_scale, c.noise.value_or(0.0)); };
  bool found = false;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    if (!std::isfinite(result.cells[i].nll)) continue;
    if (!found || key(result.cells[i]) < key(result.cells[result.best_index])) {
      result.best_index = i;
      found = true;
    }
  }
  if (!found) throw NumericalError("grid search: every cell failed (" + std::to_string(result.cells.size()) + " cells)");
  return result;
}

}  // namespace gpdistill
