#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gpdistill/csv.hpp"
#include "gpdistill/errors.hpp"
#include "gpdistill/experiments.hpp"
#include "gpdistill/gpc_distill.hpp"
#include "gpdistill/gpr_distill.hpp"
#include "gpdistill/toy_data.hpp"
#include "oracles.hpp"

using namespace gpdistill;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gpdistill_test_experiments" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentOutput run(const std::string& id, const fs::path& dir, std::uint64_t seed = 0) {
  ExperimentConfig c;
  c.id = id;
  c.out_dir = dir;
  c.seed = seed;
  return run_experiment(c);
}

KernelParams kernel_from(const json& m) {
  const json& k = m.at("kernel");
  return {k.at("signal_variance").get<double>(), k.at("length_scale").get<double>(), k.at("jitter").get<double>()};
}

Eigen::VectorXd column(const CsvTable& t, const std::string& name, const std::string& filter_col = "",
                       const std::string& filter_val = "") {
  const std::size_t c = t.column(name);
  const std::size_t f = filter_col.empty() ? 0 : t.column(filter_col);
  std::vector<double> v;
  for (const auto& row : t.rows)
    if (filter_col.empty() || row[f] == filter_val) v.push_back(parse_double(row[c]));
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Every file listed in the manifest exists with the recorded header and row count.
void check_schema(const ExperimentOutput& out, const fs::path& dir) {
  const json m = json::parse(out.manifest);
  ASSERT_TRUE(m.contains("files"));
  for (const json& f : m["files"]) {
    const CsvTable t = read_csv(dir / f["name"].get<std::string>());
    EXPECT_EQ(t.header, f["columns"].get<std::vector<std::string>>());
    EXPECT_EQ(t.rows.size(), f["rows"].get<std::size_t>());
  }
  EXPECT_EQ(out.files.back().filename(), "manifest.json");
  EXPECT_EQ(slurp(dir / "manifest.json"), out.manifest);
}

}  // namespace

TEST(Experiments, IdsAndErrors) {
  EXPECT_EQ(experiment_ids().size(), 8u);
  EXPECT_THROW(run("no-such-experiment", fresh_dir("bad")), InvalidArgument);
  const fs::path file = fresh_dir("blocker");
  fs::create_directories(file.parent_path());
  std::ofstream(file) << "x";
  EXPECT_THROW(run("cb-plots", file / "sub"), Error);
}

TEST(Experiments, GprDataDeterministicAndConsistent) {
  const fs::path a = fresh_dir("gpr-data-a"), b = fresh_dir("gpr-data-b");
  const ExperimentOutput oa = run("gpr-data-10step", a, 3);
  const ExperimentOutput ob = run("gpr-data-10step", b, 3);
  ASSERT_EQ(oa.files.size(), ob.files.size());
  for (std::size_t i = 0; i < oa.files.size(); ++i)
    EXPECT_EQ(slurp(oa.files[i]), slurp(ob.files[i])) << oa.files[i];
  check_schema(oa, a);

  const json m = json::parse(oa.manifest);
  EXPECT_EQ(m["seed"], 3);
  EXPECT_EQ(m["schedule"]["gammas"].size(), 10u);
  const KernelParams p = kernel_from(m);
  const Dataset data = regression_toy(3);
  const CsvTable pred = read_csv(a / "predictions.csv");
  const Eigen::VectorXd x = column(pred, "x", "step", "1");
  const Prediction ref = fit_gpr(data, p, 0.1).predict(Points(x));
  EXPECT_LT(oracle::max_abs(column(pred, "mean", "step", "1"), ref.mean), 1e-12 * (1 + ref.mean.cwiseAbs().maxCoeff()));
  // Percentile columns are mean -/+ 1.959964 sd.
  const Eigen::ArrayXd sd = ref.cov.diagonal().array().sqrt();
  EXPECT_LT(oracle::max_abs(column(pred, "p2.5", "step", "1"), (ref.mean.array() - 1.959964 * sd).matrix()), 1e-5);
  EXPECT_LT(oracle::max_abs(column(pred, "p97.5", "step", "1"), (ref.mean.array() + 1.959964 * sd).matrix()), 1e-5);
  // Last step against the naive chain.
  const auto naive = DataCentricGpr(data, p, DistillSchedule::linspace(0.1, 1, 10), DataCentricPath::naive);
  EXPECT_LT(oracle::rel_err(column(pred, "mean", "step", "10"), naive.predict_mean(Points(x), 10)), 1e-9);
}

TEST(Experiments, GprDistEffectiveNoise) {
  const fs::path dir = fresh_dir("gpr-dist");
  const ExperimentOutput out = run("gpr-dist-10step", dir);
  check_schema(out, dir);
  const Eigen::VectorXd eff = column(read_csv(dir / "effective_noise.csv"), "effective_noise");
  ASSERT_EQ(eff.size(), 10);
  EXPECT_NEAR(eff(0), 0.1, 1e-15);
  EXPECT_NEAR(eff(9), 0.034, 0.001);
}

TEST(Experiments, GpcDistApproximationErrorMatchesOperation) {
  const fs::path dir = fresh_dir("gpc-dist");
  const ExperimentOutput out = run("gpc-dist-10step", dir, 0);
  check_schema(out, dir);
  const json m = json::parse(out.manifest);
  const KernelParams p = kernel_from(m);
  const ClassificationToy toy = classification_toy(0, 30);
  const Points test = linspace_points(-2, 7, 90);
  const auto it = distribution_centric_gpc_iterated(toy.data, p, 10);
  std::vector<GpcModel> sc;
  for (int t = 1; t <= 10; ++t) sc.push_back(distribution_centric_gpc_scaled(toy.data, p, t));
  const CsvTable err = read_csv(dir / "approximation_error.csv");
  const auto ref_mean = approximation_error(it, sc, test, ProbabilityMethod::latent_mean);
  const auto ref_quad = approximation_error(it, sc, test, ProbabilityMethod::quadrature);
  const Eigen::VectorXd got_mean = column(err, "mse_latent_mean"), got_quad = column(err, "mse_quadrature");
  for (int s = 0; s < 10; ++s) {
    EXPECT_EQ(got_mean(s), ref_mean[static_cast<std::size_t>(s)]);
    EXPECT_EQ(got_quad(s), ref_quad[static_cast<std::size_t>(s)]);
  }
  const Eigen::VectorXd loss = column(read_csv(dir / "log_loss.csv"), "iterated");
  for (int s = 1; s < 10; ++s) EXPECT_LE(loss(s), loss(s - 1) + 1e-6);
}

TEST(Experiments, CsvInputReplacesGenerator) {
  const fs::path dir = fresh_dir("csv-input");
  fs::create_directories(dir);
  const Dataset d = regression_toy(11, false, 12);
  write_dataset_csv(dir / "in.csv", d.xs, d.ys);
  ExperimentConfig c;
  c.id = "gpr-dist-10step";
  c.out_dir = dir / "out";
  c.data_csv = dir / "in.csv";
  const ExperimentOutput out = run_experiment(c);
  const json m = json::parse(out.manifest);
  EXPECT_EQ(m["data"]["source"], "csv");
  EXPECT_EQ(read_csv(dir / "out" / "train.csv").rows.size(), 12u);
}

TEST(Experiments, CbPlotsSchema) {
  const fs::path dir = fresh_dir("cb-plots");
  const ExperimentOutput out = run("cb-plots", dir);
  check_schema(out, dir);
  const CsvTable t = read_csv(dir / "log_c_terms.csv");
  const Eigen::VectorXd a = column(t, "a"), d2 = column(t, "d2_log_C");
  EXPECT_EQ(d2(200), 1.0 / 6.0);
  EXPECT_EQ(a(200), 0.0);
}

TEST(Experiments, TimingRunsWithSmallConfig) {
  const fs::path dir = fresh_dir("timing");
  ExperimentConfig c;
  c.id = "timing";
  c.out_dir = dir;
  c.bench.steps = {1, 3};
  c.bench.repetitions = 2;
  c.bench.n = 10;
  c.bench.min_sample_seconds = 1e-4;
  const ExperimentOutput out = run_experiment(c);
  check_schema(out, dir);
  const CsvTable t = read_csv(dir / "timing.csv");
  EXPECT_EQ(t.rows.size(), 2 * bench_methods().size());
  for (double v : column(t, "relative_time_mean")) EXPECT_GT(v, 0.0);
}

TEST(Bench, EmpiricalQuantile) {
  EXPECT_EQ(empirical_quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_EQ(empirical_quantile({1, 2, 3, 4, 5}, 0.0), 1.0);
  EXPECT_EQ(empirical_quantile({1, 2, 3, 4, 5}, 1.0), 5.0);
  EXPECT_NEAR(empirical_quantile({0, 10}, 0.1), 1.0, 1e-15);
  EXPECT_THROW(empirical_quantile({}, 0.5), InvalidArgument);
}

TEST(Bench, RejectsUnknownMethod) {
  BenchConfig c;
  c.methods = {"gpr-data-turbo"};
  EXPECT_THROW(bench_fit_scaling(c), InvalidArgument);
}
