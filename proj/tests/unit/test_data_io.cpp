#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "gpdistill/artifact.hpp"
#include "gpdistill/csv.hpp"
#include "gpdistill/errors.hpp"
#include "gpdistill/quadrature.hpp"
#include "gpdistill/toy_data.hpp"
#include "oracles.hpp"

using namespace gpdistill;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gpdistill_test_data_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

ModelArtifact spec_for(Method m) {
  ModelArtifact a;
  a.method = m;
  if (is_classifier(m)) {
    const ClassificationToy toy = classification_toy(3, 20);
    a.xs = toy.data.xs;
    a.ys = toy.data.ys;
    a.params = {2.0, 0.7, 1e-8};
    a.steps = 3;
  } else {
    const Dataset d = regression_toy(3);
    a.xs = d.xs;
    a.ys = d.ys;
    a.params = {25.0, 1.0, 1e-8};
    a.noise = 0.4;
    a.schedule = DistillSchedule::linspace(0.1, 1.0, 4);
  }
  if (m == Method::gpc_data) a.reg_gammas = std::vector<double>{0.0, 0.1, 0.1};
  return a;
}

const Method kAllMethods[] = {Method::gpr, Method::gpr_data, Method::gpr_dist, Method::gpc,
                              Method::gpc_data, Method::gpc_dist, Method::gpc_dist_scaled};

}  // namespace

TEST(ToyData, RegressionGrid) {
  const Dataset d = regression_toy(0);
  ASSERT_EQ(d.size(), 10);
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_NEAR(d.xs(i, 0), 10.0 * static_cast<double>(i) / 9.0, 1e-15);
}

TEST(ToyData, NoiselessVariant) {
  const Dataset d = regression_toy(5, true);
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_EQ(d.ys(i), d.xs(i, 0) * std::sin(d.xs(i, 0)));
}

TEST(ToyData, Deterministic) {
  EXPECT_EQ(regression_toy(9).ys, regression_toy(9).ys);
  EXPECT_NE(regression_toy(9).ys, regression_toy(10).ys);
  const auto a = classification_toy(4, 50), b = classification_toy(4, 50);
  EXPECT_EQ(a.data.xs, b.data.xs);
  EXPECT_EQ(a.data.ys, b.data.ys);
}

TEST(ToyData, ClassificationRangeAndProbabilities) {
  const ClassificationToy t = classification_toy(1, 500);
  EXPECT_TRUE((t.data.xs.array() >= 0.0 && t.data.xs.array() <= 5.0).all());
  EXPECT_TRUE(t.data.strictly_binary());
  for (Eigen::Index i = 0; i < 500; ++i)
    EXPECT_NEAR(t.probabilities(i), oracle::sigmoid(2.0 * std::sin(t.data.xs(i, 0) * std::numbers::pi / 2)), 1e-15);
}

TEST(ToyData, MonteCarloLabelRate) {
  const ClassificationToy t = classification_toy(77, 4000000);
  double hits = 0, count = 0;
  for (Eigen::Index i = 0; i < t.data.size(); ++i)
    if (std::abs(t.data.xs(i, 0) - 1.0) < 0.01) {
      hits += t.data.ys(i);
      count += 1;
    }
  ASSERT_GT(count, 1e4);
  EXPECT_NEAR(hits / count, oracle::sigmoid(2.0), 0.01);
}

TEST(Csv, FormatDoubleRoundTrips) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  oracle::Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.integer(-300, 300));
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_TRUE(std::isnan(parse_double("nan")));
}

TEST(Csv, ParseDoubleIsStrict) {
  for (const char* bad : {"", "1.5x", "abc", "1,5", "--1"}) EXPECT_THROW(parse_double(bad), ParseError) << bad;
  EXPECT_EQ(parse_double("-2.5e-3"), -2.5e-3);
}

TEST(Csv, WriterChecksColumnsAndQuotes) {
  const fs::path p = scratch("quoted.csv");
  {
    CsvWriter w(p, {"name", "value"});
    w.add("a,b").add(1.5).end_row();
    w.add("say \"hi\"").add(2).end_row();
    EXPECT_THROW(w.add("x").end_row(), InvalidArgument);
  }
  const CsvTable t = read_csv(p);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "a,b");
  EXPECT_EQ(t.rows[1][0], "say \"hi\"");
  EXPECT_EQ(t.column("value"), 1u);
  EXPECT_THROW(t.column("nope"), ParseError);
}

TEST(Csv, DatasetRoundTrip) {
  oracle::Rng rng(2);
  const Points xs = rng.points(7, 3, -1, 1);
  const Eigen::VectorXd ys = rng.normals(7);
  const fs::path p = scratch("data.csv");
  write_dataset_csv(p, xs, ys);
  EXPECT_EQ(slurp(p).substr(0, 9), "x1,x2,x3,");
  const Dataset d = read_dataset_csv(p);
  EXPECT_EQ(d.xs, xs);
  EXPECT_EQ(d.ys, ys);
}

TEST(Csv, DatasetValidation) {
  const fs::path p = scratch("bad.csv");
  spit(p, "a,y\n1,2\n");
  EXPECT_THROW(read_dataset_csv(p), ParseError);
  spit(p, "x1,y\n1,2,3\n");
  EXPECT_THROW(read_dataset_csv(p), ParseError);
  spit(p, "x1,y\n1,oops\n");
  EXPECT_THROW(read_dataset_csv(p), ParseError);
  spit(p, "x1,y\n1,0.5\n2,1.5\n");
  EXPECT_NO_THROW(read_dataset_csv(p));
  EXPECT_THROW(read_binary_dataset_csv(p), ParseError);
  spit(p, "");
  EXPECT_THROW(read_dataset_csv(p), ParseError);
  EXPECT_THROW(read_dataset_csv(scratch("missing.csv")), ParseError);
}

TEST(Artifact, MethodTagsAreDistinct) {
  std::set<std::string> tags;
  for (Method m : kAllMethods) {
    tags.insert(to_string(m));
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_EQ(tags.size(), std::size(kAllMethods));
  EXPECT_THROW(parse_method("svm"), InvalidArgument);
}

TEST(Artifact, SaveLoadRoundTripEveryMethod) {
  const Points test = linspace_points(-1, 11, 23);
  for (Method m : kAllMethods) {
    const FittedModel model(spec_for(m));
    const fs::path p = scratch(std::string(to_string(m)) + ".json");
    save_model(model, p);
    const FittedModel back = load_model(p);
    EXPECT_EQ(back.artifact().method, m);
    const ModelArtifact& a = model.artifact();
    const ModelArtifact& b = back.artifact();
    EXPECT_EQ(a.params.signal_variance, b.params.signal_variance);
    EXPECT_EQ(a.params.length_scale, b.params.length_scale);
    EXPECT_EQ(a.params.jitter, b.params.jitter);
    EXPECT_EQ(a.xs, b.xs);
    EXPECT_EQ(a.ys, b.ys);
    ASSERT_EQ(a.fitted.size(), b.fitted.size());
    for (std::size_t i = 0; i < a.fitted.size(); ++i) EXPECT_EQ(a.fitted[i], b.fitted[i]);
    const ModelPrediction pa = model.predict(test), pb = back.predict(test);
    EXPECT_EQ(pa.mean, pb.mean) << to_string(m);
    EXPECT_EQ(pa.variance, pb.variance);
    EXPECT_EQ(pa.lower, pb.lower);
    EXPECT_EQ(pa.upper, pb.upper);
    EXPECT_EQ(pa.probability.has_value(), is_classifier(m));
    if (pa.probability) {
      EXPECT_EQ(*pa.probability, *pb.probability);
    }
    // Serialization is itself deterministic.
    EXPECT_EQ(artifact_to_json(a), artifact_to_json(b));
  }
}

TEST(Artifact, PredictionsMatchDirectFits) {
  const Points test = linspace_points(0, 10, 9);
  const ModelArtifact s = spec_for(Method::gpr);
  const ModelPrediction p = FittedModel(s).predict(test);
  const Prediction ref = fit_gpr({s.xs, s.ys}, s.params, s.noise).predict(test);
  EXPECT_EQ(p.mean, ref.mean);
  EXPECT_LT(oracle::max_abs(p.upper, ref.upper()), 1e-12);
  const ModelArtifact c = spec_for(Method::gpc_dist_scaled);
  const ModelPrediction pc = FittedModel(c).predict(test, ProbabilityMethod::latent_mean);
  const GpcModel g = distribution_centric_gpc_scaled({c.xs, c.ys}, c.params, 3);
  EXPECT_LT(oracle::max_abs(*pc.probability, g.predict_proba(test, ProbabilityMethod::latent_mean)), 1e-15);
}

TEST(Artifact, CorruptFilesAreRejected) {
  const FittedModel model(spec_for(Method::gpc_dist));
  const std::string good = artifact_to_json(model.artifact());
  const fs::path p = scratch("corrupt.json");

  spit(p, good.substr(0, good.size() / 2));
  EXPECT_THROW(load_model(p), ParseError);

  std::string wrong_version = good;
  const auto pos = wrong_version.find("\"format_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  wrong_version.replace(pos, 19, "\"format_version\": 99");
  spit(p, wrong_version);
  EXPECT_THROW(load_model(p), ParseError);

  std::string wrong_method = good;
  wrong_method.replace(wrong_method.find("\"gpc-dist\""), 10, "\"gpc-xyz\"");
  spit(p, wrong_method);
  EXPECT_THROW(load_model(p), ParseError);

  // Change a training label so the stored fitted vectors no longer match.
  ModelArtifact tampered = model.artifact();
  tampered.ys(0) = 1.0 - tampered.ys(0);
  spit(p, artifact_to_json(tampered));
  EXPECT_THROW(load_model(p), ParseError);

  spit(p, "{}");
  EXPECT_THROW(load_model(p), ParseError);
  EXPECT_THROW(load_model(scratch("absent.json")), ParseError);
}
