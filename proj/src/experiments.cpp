#include "gpdistill/experiments.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "gpdistill/continuous_bernoulli.hpp"
#include "gpdistill/csv.hpp"
#include "gpdistill/errors.hpp"
#include "gpdistill/gpc_distill.hpp"
#include "gpdistill/gpr_distill.hpp"
#include "gpdistill/hyperopt.hpp"
#include "gpdistill/quadrature.hpp"
#include "gpdistill/toy_data.hpp"

namespace gpdistill {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"gpr-data-10step", "gpr-dist-10step",    "gpc-data-cb", "gpc-dist-10step",
                                            "grid-search",     "gpr-noise-ablation", "cb-plots",    "timing"};
  return ids;
}

namespace {

constexpr Eigen::Index kClassificationN = 30;
constexpr double kSelectionNoise = 1.0;

class Run {
 public:
  explicit Run(const ExperimentConfig& cfg) : cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir))
      throw Error("cannot create output directory '" + cfg.out_dir.string() + "'");
    manifest_["experiment"] = cfg.id;
    manifest_["seed"] = cfg.seed;
    manifest_["manifest_version"] = 1;
  }

  json& manifest() { return manifest_; }

  CsvWriter open(const std::string& name, const std::vector<std::string>& header) {
    pending_[name] = header;
    return CsvWriter(cfg_.out_dir / name, header);
  }

  void close(const CsvWriter& w) {
    const std::string name = w.path().filename().string();
    const auto& header = pending_.at(name);
    manifest_["files"].push_back({{"name", name}, {"columns", header}, {"rows", w.rows()}});
    out_.files.push_back(cfg_.out_dir / name);
  }

  ExperimentOutput finish() {
    out_.manifest = manifest_.dump(2) + "\n";
    const fs::path path = cfg_.out_dir / "manifest.json";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << out_.manifest;
    out_.files.push_back(path);
    return std::move(out_);
  }

 private:
  const ExperimentConfig& cfg_;
  json manifest_;
  std::map<std::string, std::vector<std::string>> pending_;
  ExperimentOutput out_;
};

json kernel_json(const KernelParams& p) {
  return {{"type", "rbf"},
          {"form", "signal_variance * exp(-|a-b|^2 / (2 * length_scale))"},
          {"signal_variance", p.signal_variance},
          {"length_scale", p.length_scale},
          {"jitter", p.jitter}};
}

json grid_json(const GridSpec& g) {
  json j{{"sigma_f_values", g.sigma_f_values}, {"length_scale_values", g.length_scale_values}};
  if (g.noise_values) j["noise_values"] = *g.noise_values;
  return j;
}

void write_grid(Run& run, const std::string& name, const GridResult& r, bool with_noise) {
  std::vector<std::string> header{"sigma_f", "length_scale"};
  if (with_noise) header.push_back("noise");
  header.insert(header.end(), {"nll", "status"});
  CsvWriter w = run.open(name, header);
  for (const auto& c : r.cells) {
    w.add(c.sigma_f).add(c.length_scale);
    if (with_noise) w.add(c.noise.value_or(0.0));
    w.add(c.nll).add(c.failure.empty() ? "ok" : "failed");
    w.end_row();
  }
  run.close(w);
}

json best_json(const GridResult& r) {
  const GridCell& c = r.best();
  json j{{"sigma_f", c.sigma_f}, {"length_scale", c.length_scale}, {"nll", c.nll}};
  if (c.noise) j["noise"] = *c.noise;
  return j;
}

Dataset regression_data(const ExperimentConfig& cfg, json& m) {
  if (cfg.data_csv) {
    m["data"] = {{"source", "csv"}, {"file", cfg.data_csv->filename().string()}};
    return read_dataset_csv(*cfg.data_csv);
  }
  m["data"] = {{"source", "generated"},
               {"generator", "regression_toy"},
               {"function", "g(z) = z sin(z)"},
               {"inputs", "10 equidistant points on [0, 10]"},
               {"noise", "standard normal"},
               {"rng", "mt19937_64"}};
  return regression_toy(cfg.seed);
}

ClassificationToy classification_data(const ExperimentConfig& cfg, json& m) {
  if (cfg.data_csv) {
    m["data"] = {{"source", "csv"}, {"file", cfg.data_csv->filename().string()}};
    BinaryDataset d = read_binary_dataset_csv(*cfg.data_csv);
    Eigen::VectorXd p = d.ys;
    return ClassificationToy{std::move(d), std::move(p)};
  }
  m["data"] = {{"source", "generated"},
               {"generator", "classification_toy"},
               {"n", kClassificationN},
               {"inputs", "U(0, 5)"},
               {"latent", "g(x) = 2 sin(x pi / 2)"},
               {"label_probability", "sigmoid(g(x))"},
               {"rng", "mt19937_64"}};
  return classification_toy(cfg.seed, kClassificationN);
}

// 1-d data gets an equidistant grid; otherwise predictions are made at the
// training inputs.
Points test_points(const Points& train, double lo, double hi, Eigen::Index n, json& m) {
  if (train.cols() != 1) {
    m["test_points"] = "training inputs";
    return train;
  }
  m["test_points"] = {{"lo", lo}, {"hi", hi}, {"n", n}};
  return linspace_points(lo, hi, n);
}

KernelParams select_gpr(Run& run, const Dataset& d) {
  GridSpec grid = GridSpec::default_grid();
  grid.noise_values = std::vector<double>{kSelectionNoise};
  const GridResult r = grid_search(d.xs, d.ys, grid, Objective::gpr_nll);
  write_grid(run, "selection_grid.csv", r, true);
  run.manifest()["hyperparameter_selection"] = {
      {"objective", to_string(Objective::gpr_nll)}, {"grid", grid_json(grid)}, {"best", best_json(r)}};
  return r.best_params();
}

KernelParams select_gpc(Run& run, const BinaryDataset& d) {
  const GridSpec grid = GridSpec::default_grid();
  const GridResult r = grid_search(d.xs, d.ys, grid, Objective::gpc_bernoulli_nll);
  write_grid(run, "selection_grid.csv", r, false);
  run.manifest()["hyperparameter_selection"] = {
      {"objective", to_string(Objective::gpc_bernoulli_nll)}, {"grid", grid_json(grid)}, {"best", best_json(r)}};
  return r.best_params();
}

void write_training(Run& run, const Points& xs, const Eigen::VectorXd& ys) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("y");
  CsvWriter w = run.open("train.csv", header);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j) w.add(xs(i, j));
    w.add(ys(i)).end_row();
  }
  run.close(w);
}

void add_regression_rows(CsvWriter& w, const std::vector<std::string>& prefix, const Points& xs, const Prediction& p) {
  const Eigen::VectorXd lo = p.lower();
  const Eigen::VectorXd hi = p.upper();
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (const auto& s : prefix) w.add(s);
    w.add(xs(i, 0)).add(p.mean(i)).add(lo(i)).add(hi(i)).end_row();
  }
}

json schedule_json(const DistillSchedule& s) { return {{"gammas", s.gammas}, {"steps", s.steps()}}; }

ExperimentOutput gpr_10step(const ExperimentConfig& cfg, bool data_centric) {
  Run run(cfg);
  auto& m = run.manifest();
  const Dataset data = regression_data(cfg, m);
  write_training(run, data.xs, data.ys);
  const KernelParams params = select_gpr(run, data);
  m["kernel"] = kernel_json(params);
  const DistillSchedule sched = DistillSchedule::linspace(0.1, 1.0, 10);
  m["schedule"] = schedule_json(sched);
  m["method"] = data_centric ? "gpr-data" : "gpr-dist";
  const Points test = test_points(data.xs, 0.0, 10.0, 101, m);

  CsvWriter w = run.open("predictions.csv", {"step", "x", "mean", "p2.5", "p97.5"});
  if (data_centric) {
    const DataCentricGpr chain(data, params, sched, DataCentricPath::spectral);
    for (std::size_t t = 1; t <= sched.steps(); ++t) add_regression_rows(w, {std::to_string(t)}, test, chain.predict(test, t));
  } else {
    for (std::size_t t = 1; t <= sched.steps(); ++t)
      add_regression_rows(w, {std::to_string(t)}, test, distribution_centric_closed_form(data, params, sched, t, test));
  }
  run.close(w);

  if (data_centric) {
    const DataCentricGpr chain(data, params, sched, DataCentricPath::spectral);
    CsvWriter tw = run.open("targets.csv", {"step", "x", "target"});
    for (std::size_t t = 1; t <= sched.steps() + 1; ++t) {
      const Eigen::VectorXd y = chain.targets(t);
      for (Eigen::Index i = 0; i < y.size(); ++i) tw.add(t).add(data.xs(i, 0)).add(y(i)).end_row();
    }
    run.close(tw);
  } else {
    CsvWriter ew = run.open("effective_noise.csv", {"step", "gamma", "gamma_minus", "effective_noise"});
    for (std::size_t t = 1; t <= sched.steps(); ++t) {
      const EffectiveNoise e = effective_noise(sched, t);
      ew.add(t).add(sched.gammas[t - 1]).add(e.gamma_minus).add(e.effective).end_row();
    }
    run.close(ew);
  }
  return run.finish();
}

ExperimentOutput gpc_data_cb(const ExperimentConfig& cfg) {
  Run run(cfg);
  auto& m = run.manifest();
  const ClassificationToy toy = classification_data(cfg, m);
  write_training(run, toy.data.xs, toy.data.ys);
  const KernelParams params = select_gpc(run, toy.data);
  m["kernel"] = kernel_json(params);
  m["probability_method"] = to_string(ProbabilityMethod::quadrature);
  const Points test = test_points(toy.data.xs, -2.0, 7.0, 90, m);

  struct Variant {
    std::string name;
    Likelihood lik;
    TargetKind kind;
    double reg;
  };
  const std::vector<Variant> variants{
      {"cb-step2", Likelihood::continuous_bernoulli, TargetKind::soft_mean, 0.0},
      {"bernoulli-step2", Likelihood::bernoulli, TargetKind::soft_mean, 0.0},
      {"cb-step2-reg0.1", Likelihood::continuous_bernoulli, TargetKind::soft_mean, 0.1},
      {"cb-step2-reg1", Likelihood::continuous_bernoulli, TargetKind::soft_mean, 1.0},
      {"cb-step2-hard", Likelihood::continuous_bernoulli, TargetKind::hard_threshold, 0.0},
      {"bernoulli-step2-hard", Likelihood::bernoulli, TargetKind::hard_threshold, 0.0},
  };

  CsvWriter pw = run.open("predictions.csv", {"variant", "x", "probability", "latent_mean", "latent_var"});
  CsvWriter tw = run.open("targets.csv", {"variant", "x", "target"});
  json vj = json::array();
  auto emit = [&](const std::string& name, const GpcModel& model) {
    const auto [mean, var] = model.predict_marginals(test);
    for (Eigen::Index i = 0; i < test.rows(); ++i)
      pw.add(name).add(test(i, 0)).add(expected_sigmoid(mean(i), var(i))).add(mean(i)).add(var(i)).end_row();
    for (Eigen::Index i = 0; i < model.targets().size(); ++i)
      tw.add(name).add(toy.data.xs(i, 0)).add(model.targets()(i)).end_row();
  };
  bool first = true;
  for (const auto& v : variants) {
    GpcDistillConfig dc;
    dc.steps = 2;
    dc.target_kind = v.kind;
    dc.distill_likelihood = v.lik;
    if (v.reg > 0.0) dc.reg_gammas = std::vector<double>{0.0, v.reg};
    const DataCentricGpcResult r = data_centric_gpc(toy.data, params, dc);
    if (first) {
      emit("bernoulli-step1", r.models[0]);
      vj.push_back({{"name", "bernoulli-step1"}, {"likelihood", "bernoulli"}, {"targets", "labels"}});
      first = false;
    }
    emit(v.name, r.models[1]);
    vj.push_back({{"name", v.name},
                  {"likelihood", to_string(v.lik)},
                  {"targets", to_string(v.kind)},
                  {"reg_gamma", v.reg},
                  {"newton_iterations", r.models[1].fit().iterations}});
  }
  run.close(pw);
  run.close(tw);
  m["variants"] = vj;
  return run.finish();
}

ExperimentOutput gpc_dist_10step(const ExperimentConfig& cfg) {
  Run run(cfg);
  auto& m = run.manifest();
  const ClassificationToy toy = classification_data(cfg, m);
  write_training(run, toy.data.xs, toy.data.ys);
  const KernelParams params = select_gpc(run, toy.data);
  m["kernel"] = kernel_json(params);
  const int steps = 10;
  m["steps"] = steps;
  m["probability_methods"] = {to_string(ProbabilityMethod::latent_mean), to_string(ProbabilityMethod::quadrature)};
  const Points test = test_points(toy.data.xs, -2.0, 7.0, 90, m);

  const std::vector<GpcModel> iterated = distribution_centric_gpc_iterated(toy.data, params, steps);
  std::vector<GpcModel> scaled;
  for (int t = 1; t <= steps; ++t) scaled.push_back(distribution_centric_gpc_scaled(toy.data, params, t));
  const auto err_mean = approximation_error(iterated, scaled, test, ProbabilityMethod::latent_mean);
  const auto err_quad = approximation_error(iterated, scaled, test, ProbabilityMethod::quadrature);

  CsvWriter pw = run.open("predictions.csv",
                          {"step", "x", "iterated_latent_mean", "scaled_latent_mean", "iterated_quadrature",
                           "scaled_quadrature"});
  CsvWriter lw = run.open("log_loss.csv", {"step", "iterated", "scaled"});
  for (int t = 1; t <= steps; ++t) {
    const auto& it = iterated[static_cast<std::size_t>(t - 1)];
    const auto& sc = scaled[static_cast<std::size_t>(t - 1)];
    const Eigen::VectorXd im = it.predict_proba(test, ProbabilityMethod::latent_mean);
    const Eigen::VectorXd sm = sc.predict_proba(test, ProbabilityMethod::latent_mean);
    const Eigen::VectorXd iq = it.predict_proba(test, ProbabilityMethod::quadrature);
    const Eigen::VectorXd sq = sc.predict_proba(test, ProbabilityMethod::quadrature);
    for (Eigen::Index i = 0; i < test.rows(); ++i)
      pw.add(t).add(test(i, 0)).add(im(i)).add(sm(i)).add(iq(i)).add(sq(i)).end_row();
    lw.add(t)
        .add(log_loss(toy.data.ys, it.predict_proba(toy.data.xs, ProbabilityMethod::quadrature)))
        .add(log_loss(toy.data.ys, sc.predict_proba(toy.data.xs, ProbabilityMethod::quadrature)))
        .end_row();
  }
  run.close(pw);
  run.close(lw);

  CsvWriter ew = run.open("approximation_error.csv", {"step", "mse_latent_mean", "mse_quadrature"});
  for (std::size_t s = 0; s < err_mean.size(); ++s) ew.add(s + 1).add(err_mean[s]).add(err_quad[s]).end_row();
  run.close(ew);
  return run.finish();
}

ExperimentOutput grid_search_experiment(const ExperimentConfig& cfg) {
  Run run(cfg);
  auto& m = run.manifest();
  const ClassificationToy toy = classification_data(cfg, m);
  // Both classifier grids are fitted to the continuous probabilities.
  write_training(run, toy.data.xs, toy.probabilities);
  const GridSpec grid = GridSpec::default_grid();
  m["targets"] = "sigmoid(g(x)) at the sampled inputs";
  json grids = json::object();
  for (Objective o : {Objective::gpc_bernoulli_nll, Objective::gpc_cb_nll}) {
    const GridResult r = grid_search(toy.data.xs, toy.probabilities, grid, o);
    const std::string name = o == Objective::gpc_cb_nll ? "grid_cb.csv" : "grid_bernoulli.csv";
    write_grid(run, name, r, false);
    grids[to_string(o)] = {{"file", name}, {"grid", grid_json(grid)}, {"best", best_json(r)}};
  }

  const Dataset reg = regression_toy(cfg.seed);
  GridSpec rgrid = GridSpec::default_grid();
  rgrid.noise_values = GridSpec::log_spaced(1e-2, 1e1, 4);
  const GridResult rr = grid_search(reg.xs, reg.ys, rgrid, Objective::gpr_nll);
  write_grid(run, "grid_gpr.csv", rr, true);
  grids[to_string(Objective::gpr_nll)] = {
      {"file", "grid_gpr.csv"}, {"data", "regression_toy"}, {"grid", grid_json(rgrid)}, {"best", best_json(rr)}};
  m["grids"] = grids;
  m["tie_break"] = "smallest sigma_f, then length_scale, then noise";
  return run.finish();
}

ExperimentOutput noise_ablation(const ExperimentConfig& cfg) {
  Run run(cfg);
  auto& m = run.manifest();
  const Dataset data = regression_data(cfg, m);
  write_training(run, data.xs, data.ys);
  const KernelParams params = select_gpr(run, data);
  m["kernel"] = kernel_json(params);
  const Points test = test_points(data.xs, 0.0, 10.0, 101, m);

  const std::vector<std::pair<std::string, DistillSchedule>> schedules{
      {"constant-0.2", DistillSchedule::constant(0.2, 10)},
      {"linspace-1-0.1", DistillSchedule::linspace(1.0, 0.1, 10)},
      {"linspace-0.1-3", DistillSchedule::linspace(0.1, 3.0, 10)},
      {"linspace-3-0.1", DistillSchedule::linspace(3.0, 0.1, 10)},
  };
  json sj = json::object();
  CsvWriter w = run.open("predictions.csv", {"schedule", "method", "step", "x", "mean", "p2.5", "p97.5"});
  for (const auto& [name, sched] : schedules) {
    sj[name] = sched.gammas;
    const DataCentricGpr chain(data, params, sched, DataCentricPath::spectral);
    for (std::size_t t = 1; t <= sched.steps(); ++t)
      add_regression_rows(w, {name, "gpr-data", std::to_string(t)}, test, chain.predict(test, t));
    for (std::size_t t = 1; t <= sched.steps(); ++t)
      add_regression_rows(w, {name, "gpr-dist", std::to_string(t)}, test,
                          distribution_centric_closed_form(data, params, sched, t, test));
  }
  run.close(w);
  m["schedules"] = sj;
  return run.finish();
}

ExperimentOutput cb_plots(const ExperimentConfig& cfg) {
  Run run(cfg);
  CsvWriter nw = run.open("normalizer.csv", {"lambda", "C", "log_C"});
  for (int i = 1; i < 200; ++i) {
    const double lam = i / 200.0;
    const double c = cb_normalizer(lam);
    nw.add(lam).add(c).add(std::log(c)).end_row();
  }
  run.close(nw);

  CsvWriter tw = run.open("log_c_terms.csv", {"a", "log_C", "d_log_C", "d2_log_C"});
  for (int i = 0; i <= 400; ++i) {
    const double a = -10.0 + 20.0 * i / 400.0;
    const CbTerms t = cb_terms_at_latent(a);
    tw.add(a).add(t.log_c).add(t.dlog_c).add(t.d2log_c).end_row();
  }
  run.close(tw);

  const std::vector<double> lambdas{0.1, 0.3, 0.5, 0.7, 0.9};
  CsvWriter dw = run.open("density.csv", {"lambda", "x", "density"});
  for (double lam : lambdas)
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      dw.add(lam).add(x).add(std::exp(cb_log_density(x, lam))).end_row();
    }
  run.close(dw);
  run.manifest()["lambdas"] = lambdas;
  return run.finish();
}

ExperimentOutput timing(const ExperimentConfig& cfg) {
  Run run(cfg);
  BenchConfig bc = cfg.bench;
  bc.seed = cfg.seed;
  const BenchResult r = bench_fit_scaling(bc);
  CsvWriter w = run.open("timing.csv", {"method", "steps", "relative_time_mean", "relative_time_q10", "relative_time_q90"});
  for (const auto& row : r.rows) w.add(row.method).add(row.steps).add(row.mean).add(row.q10).add(row.q90).end_row();
  run.close(w);
  CsvWriter sw = run.open("timing_slopes.csv", {"method", "slope_per_step", "intercept"});
  for (const auto& s : r.slopes) sw.add(s.method).add(s.slope).add(s.intercept).end_row();
  run.close(sw);
  auto& m = run.manifest();
  m["bench"] = {{"steps", bc.steps},
                {"repetitions", bc.repetitions},
                {"n", bc.n},
                {"min_sample_seconds", bc.min_sample_seconds},
                {"baseline", "single ordinary fit plus prediction, same data"}};
  m["baseline_seconds"] = {{"gpr", r.gpr_baseline_seconds}, {"gpc", r.gpc_baseline_seconds}};
  return run.finish();
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  const std::string& id = config.id;
  if (id == "gpr-data-10step") return gpr_10step(config, true);
  if (id == "gpr-dist-10step") return gpr_10step(config, false);
  if (id == "gpc-data-cb") return gpc_data_cb(config);
  if (id == "gpc-dist-10step") return gpc_dist_10step(config);
  if (id == "grid-search") return grid_search_experiment(config);
  if (id == "gpr-noise-ablation") return noise_ablation(config);
  if (id == "cb-plots") return cb_plots(config);
  if (id == "timing") return timing(config);
  throw InvalidArgument("unknown experiment '" + id + "'");
}

}  // namespace gpdistill
