// gpdistill command-line front end.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpdistill/artifact.hpp"
#include "gpdistill/bench.hpp"
#include "gpdistill/csv.hpp"
#include "gpdistill/errors.hpp"
#include "gpdistill/experiments.hpp"
#include "gpdistill/hyperopt.hpp"
#include "gpdistill/toy_data.hpp"

namespace fs = std::filesystem;
using namespace gpdistill;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

// "a,b,c", "linspace:lo:hi:n" or "logspace:lo:hi:n"
std::vector<double> parse_values(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 4 && (parts[0] == "linspace" || parts[0] == "logspace")) {
    const double lo = parse_double(parts[1]);
    const double hi = parse_double(parts[2]);
    std::size_t n = 0;
    const auto res = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), n);
    if (res.ec != std::errc() || res.ptr != parts[3].data() + parts[3].size() || n == 0)
      throw InvalidArgument("bad count in '" + spec + "'");
    if (parts[0] == "logspace") return GridSpec::log_spaced(lo, hi, n);
    return DistillSchedule::linspace(lo, hi, n).gammas;
  }
  if (parts.size() != 1) throw InvalidArgument("cannot parse value list '" + spec + "'");
  std::vector<double> v;
  for (const auto& f : split(spec, ',')) v.push_back(parse_double(f));
  return v;
}

Likelihood parse_likelihood(const std::string& s) {
  if (s == "cb" || s == "continuous_bernoulli" || s == "continuous-bernoulli") return Likelihood::continuous_bernoulli;
  if (s == "bernoulli") return Likelihood::bernoulli;
  throw InvalidArgument("unknown likelihood '" + s + "'");
}

ProbabilityMethod parse_probability(const std::string& s) {
  if (s == "quadrature") return ProbabilityMethod::quadrature;
  if (s == "latent-mean" || s == "latent_mean") return ProbabilityMethod::latent_mean;
  throw InvalidArgument("unknown probability method '" + s + "'");
}

struct KernelFlags {
  double signal_variance = 1.0;
  double length_scale = 1.0;
  double jitter = kDefaultJitter;

  void attach(CLI::App* cmd) {
    cmd->add_option("--signal-variance", signal_variance, "kernel signal variance sigma_f^2")->capture_default_str();
    cmd->add_option("--length-scale", length_scale, "kernel length scale l in exp(-d^2 / 2l)")->capture_default_str();
    cmd->add_option("--jitter", jitter, "diagonal jitter for classifiers")->capture_default_str();
  }
  KernelParams params() const { return KernelParams{signal_variance, length_scale, jitter}; }
};

Points read_points(const fs::path& path) {
  const CsvTable t = read_csv(path);
  std::vector<std::size_t> cols;
  for (std::size_t j = 0;; ++j) {
    const std::string name = "x" + std::to_string(j + 1);
    auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) break;
    cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  if (cols.empty()) throw ParseError(path.string() + ": no x1 column");
  Points xs(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(t.rows[i][cols[j]]);
  return xs;
}

void write_predictions(const fs::path& path, const Points& xs, const ModelPrediction& p) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
  header.insert(header.end(), {"mean", "variance", "p2.5", "p97.5"});
  if (p.probability) header.push_back("probability");
  CsvWriter w(path, header);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j) w.add(xs(i, j));
    w.add(p.mean(i)).add(p.variance(i)).add(p.lower(i)).add(p.upper(i));
    if (p.probability) w.add((*p.probability)(i));
    w.end_row();
  }
}

void report_numerical(const NumericalError& e) {
  std::cerr << "numerical failure: " << e.what() << '\n';
  if (e.step) std::cerr << "  step: " << *e.step << '\n';
  if (e.cell) std::cerr << "  cell: " << *e.cell << '\n';
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&e))
    std::cerr << "  newton iterations: " << c->iterations << ", gradient norm: " << c->grad_norm << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-distillation for Gaussian process regression and classification"};
  app.require_subcommand(1);

  // gen-data
  std::string gen_kind = "regression";
  std::uint64_t seed = 0;
  long long gen_n = 0;
  bool noiseless = false;
  fs::path out;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic toy dataset as CSV");
  gen->add_option("--kind", gen_kind, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}))
      ->capture_default_str();
  gen->add_option("--seed", seed, "random seed")->capture_default_str();
  gen->add_option("--n", gen_n, "number of points (default 10 for regression, 30 for classification)");
  gen->add_flag("--noiseless", noiseless, "regression targets without noise");
  gen->add_option("--out", out, "output CSV")->required();

  // fit
  std::string fit_method = "gpr";
  fs::path data_path;
  double noise = 1.0;
  double reg_gamma = 0.0;
  KernelFlags kernel;
  auto* fit = app.add_subcommand("fit", "fit an ordinary GP and save it");
  fit->add_option("--method", fit_method, "gpr or gpc")->check(CLI::IsMember({"gpr", "gpc"}))->capture_default_str();
  fit->add_option("--data", data_path, "training CSV with header x1,...,xd,y")->required();
  fit->add_option("--noise", noise, "GPR observation noise")->capture_default_str();
  fit->add_option("--reg-gamma", reg_gamma, "GPC diagonal regularization")->capture_default_str();
  kernel.attach(fit);
  fit->add_option("--out", out, "model file (JSON)")->required();

  // distill
  std::string distill_method = "gpr-data";
  std::string gammas = "linspace:0.1:1:10";
  int steps = 10;
  std::string target_kind = "soft_mean";
  std::string likelihood = "cb";
  std::string reg_gammas;
  auto* distill = app.add_subcommand("distill", "run a self-distillation chain and save the final model");
  distill->add_option("--method", distill_method, "gpr-data, gpr-dist, gpc-data, gpc-dist or gpc-dist-scaled")
      ->check(CLI::IsMember({"gpr-data", "gpr-dist", "gpc-data", "gpc-dist", "gpc-dist-scaled"}))
      ->capture_default_str();
  distill->add_option("--data", data_path, "training CSV; a toy dataset is generated when omitted");
  distill->add_option("--seed", seed, "seed for the generated toy dataset")->capture_default_str();
  distill->add_option("--gammas", gammas, "GPR noise schedule: a,b,c or linspace:lo:hi:n")->capture_default_str();
  distill->add_option("--steps", steps, "GPC step count")->capture_default_str();
  distill->add_option("--target-kind", target_kind, "soft_mean, latent_sigmoid or hard_threshold")
      ->capture_default_str();
  distill->add_option("--likelihood", likelihood, "likelihood of GPC steps >= 2: cb or bernoulli")
      ->capture_default_str();
  distill->add_option("--reg-gammas", reg_gammas, "per-step GPC diagonal regularization");
  kernel.attach(distill);
  distill->add_option("--out", out, "model file (JSON)")->required();

  // predict
  fs::path model_path;
  std::string xs_spec;
  fs::path points_path;
  std::string prob_method = "quadrature";
  auto* predict = app.add_subcommand("predict", "predict with a saved model");
  predict->add_option("--model", model_path, "model file")->required();
  auto* xs_opt = predict->add_option("--x", xs_spec, "1-d test inputs: a,b,c or linspace:lo:hi:n");
  predict->add_option("--points", points_path, "CSV of test inputs with columns x1,...,xd")->excludes(xs_opt);
  predict->add_option("--probability", prob_method, "quadrature or latent-mean")->capture_default_str();
  predict->add_option("--out", out, "output CSV")->required();

  // grid-search
  std::string objective = "gpr_nll";
  std::string sigma_f_spec = "logspace:1e-2:1e2:16";
  std::string length_spec = "logspace:1e-2:1e2:16";
  std::string noise_spec;
  auto* grid = app.add_subcommand("grid-search", "evaluate the negative log marginal likelihood over a grid");
  grid->add_option("--data", data_path, "training CSV")->required();
  grid->add_option("--objective", objective, "gpr_nll, gpc_bernoulli_nll or gpc_cb_nll")->capture_default_str();
  grid->add_option("--sigma-f", sigma_f_spec, "sigma_f axis")->capture_default_str();
  grid->add_option("--length-scale", length_spec, "length scale axis")->capture_default_str();
  grid->add_option("--noise", noise_spec, "noise axis (required for gpr_nll)");
  grid->add_option("--jitter", kernel.jitter, "diagonal jitter")->capture_default_str();
  grid->add_option("--out", out, "grid CSV")->required();

  // reproduce
  std::string experiment;
  fs::path out_dir;
  BenchConfig bench_cfg;
  auto* reproduce = app.add_subcommand("reproduce", "run a named experiment and write CSV files plus a manifest");
  reproduce->add_option("experiment", experiment, "experiment id")->required()->check(CLI::IsMember(experiment_ids()));
  reproduce->add_option("--out-dir", out_dir, "output directory")->required();
  reproduce->add_option("--seed", seed, "random seed")->capture_default_str();
  reproduce->add_option("--data", data_path, "use this CSV instead of the generated toy data");

  // bench
  std::string bench_steps = "1,5,10,20";
  auto* bench = app.add_subcommand("bench", "relative fit time against a single ordinary fit");
  bench->add_option("--steps", bench_steps, "step counts")->capture_default_str();
  bench->add_option("--repetitions", bench_cfg.repetitions, "timing repetitions")->capture_default_str();
  bench->add_option("--n", bench_cfg.n, "training set size")->capture_default_str();
  bench->add_option("--seed", seed, "random seed")->capture_default_str();
  bench->add_option("--out", out, "timing CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      if (gen_kind == "regression") {
        const Dataset d = regression_toy(seed, noiseless, gen_n > 0 ? gen_n : 10);
        write_dataset_csv(out, d.xs, d.ys);
      } else {
        const ClassificationToy t = classification_toy(seed, gen_n > 0 ? gen_n : 30);
        write_dataset_csv(out, t.data.xs, t.data.ys);
      }
    } else if (*fit) {
      ModelArtifact spec;
      spec.params = kernel.params();
      const Dataset d = read_dataset_csv(data_path);
      spec.xs = d.xs;
      spec.ys = d.ys;
      if (fit_method == "gpr") {
        spec.method = Method::gpr;
        spec.noise = noise;
      } else {
        spec.method = Method::gpc;
        if (reg_gamma > 0.0) spec.reg_gammas = std::vector<double>{reg_gamma};
      }
      save_model(FittedModel(std::move(spec)), out);
    } else if (*distill) {
      ModelArtifact spec;
      spec.method = parse_method(distill_method);
      spec.params = kernel.params();
      const bool classifier = is_classifier(spec.method);
      if (!data_path.empty()) {
        const Dataset d = read_dataset_csv(data_path);
        spec.xs = d.xs;
        spec.ys = d.ys;
      } else if (classifier) {
        const ClassificationToy t = classification_toy(seed, 30);
        spec.xs = t.data.xs;
        spec.ys = t.data.ys;
      } else {
        const Dataset d = regression_toy(seed);
        spec.xs = d.xs;
        spec.ys = d.ys;
      }
      if (classifier) {
        spec.steps = steps;
        spec.target_kind = parse_target_kind(target_kind);
        spec.distill_likelihood = parse_likelihood(likelihood);
        if (!reg_gammas.empty()) spec.reg_gammas = parse_values(reg_gammas);
      } else {
        spec.schedule.gammas = parse_values(gammas);
      }
      save_model(FittedModel(std::move(spec)), out);
    } else if (*predict) {
      const FittedModel model = load_model(model_path);
      Points xs;
      if (!points_path.empty()) {
        xs = read_points(points_path);
      } else if (!xs_spec.empty()) {
        const auto v = parse_values(xs_spec);
        xs = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      } else {
        xs = model.artifact().xs;
      }
      if (xs.cols() != model.artifact().xs.cols())
        throw InvalidArgument("test inputs have " + std::to_string(xs.cols()) + " columns, model expects " +
                              std::to_string(model.artifact().xs.cols()));
      write_predictions(out, xs, model.predict(xs, parse_probability(prob_method)));
    } else if (*grid) {
      const Dataset d = read_dataset_csv(data_path);
      GridSpec spec{parse_values(sigma_f_spec), parse_values(length_spec), std::nullopt};
      if (!noise_spec.empty()) spec.noise_values = parse_values(noise_spec);
      const GridResult r = grid_search(d.xs, d.ys, spec, parse_objective(objective), kernel.jitter);
      std::vector<std::string> header{"sigma_f", "length_scale"};
      if (spec.noise_values) header.push_back("noise");
      header.insert(header.end(), {"nll", "status"});
      CsvWriter w(out, header);
      for (const auto& c : r.cells) {
        w.add(c.sigma_f).add(c.length_scale);
        if (spec.noise_values) w.add(*c.noise);
        w.add(c.nll).add(c.failure.empty() ? "ok" : "failed").end_row();
      }
      const GridCell& b = r.best();
      std::cout << "best sigma_f=" << format_double(b.sigma_f) << " length_scale=" << format_double(b.length_scale);
      if (b.noise) std::cout << " noise=" << format_double(*b.noise);
      std::cout << " nll=" << format_double(b.nll) << '\n';
    } else if (*reproduce) {
      ExperimentConfig cfg;
      cfg.id = experiment;
      cfg.out_dir = out_dir;
      cfg.seed = seed;
      if (!data_path.empty()) cfg.data_csv = data_path;
      const ExperimentOutput res = run_experiment(cfg);
      for (const auto& f : res.files) std::cout << f.string() << '\n';
    } else if (*bench) {
      bench_cfg.seed = seed;
      bench_cfg.steps.clear();
      for (double v : parse_values(bench_steps)) bench_cfg.steps.push_back(static_cast<int>(v));
      const BenchResult r = bench_fit_scaling(bench_cfg);
      CsvWriter w(out, {"method", "steps", "relative_time_mean", "relative_time_q10", "relative_time_q90"});
      for (const auto& row : r.rows) w.add(row.method).add(row.steps).add(row.mean).add(row.q10).add(row.q90).end_row();
      for (const auto& s : r.slopes) std::cout << s.method << " slope=" << format_double(s.slope) << '\n';
    }
  } catch (const NumericalError& e) {
    report_numerical(e);
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
