#include "gpdistill/artifact.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gpdistill/errors.hpp"

namespace gpdistill {

using nlohmann::json;

const char* to_string(Method m) {
  switch (m) {
    case Method::gpr: return "gpr";
    case Method::gpr_data: return "gpr-data";
    case Method::gpr_dist: return "gpr-dist";
    case Method::gpc: return "gpc";
    case Method::gpc_data: return "gpc-data";
    case Method::gpc_dist: return "gpc-dist";
    case Method::gpc_dist_scaled: return "gpc-dist-scaled";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::gpr, Method::gpr_data, Method::gpr_dist, Method::gpc, Method::gpc_data, Method::gpc_dist,
                   Method::gpc_dist_scaled})
    if (s == to_string(m)) return m;
  throw InvalidArgument("unknown method '" + s + "'");
}

bool is_classifier(Method m) {
  return m == Method::gpc || m == Method::gpc_data || m == Method::gpc_dist || m == Method::gpc_dist_scaled;
}

FittedModel::FittedModel(ModelArtifact spec) : art_(std::move(spec)) {
  art_.fitted.clear();
  switch (art_.method) {
    case Method::gpr: {
      GprModel m = fit_gpr(Dataset{art_.xs, art_.ys}, art_.params, art_.noise);
      art_.fitted.push_back(m.alpha_weights());
      model_ = std::move(m);
      break;
    }
    case Method::gpr_data: {
      DataCentricGpr m(Dataset{art_.xs, art_.ys}, art_.params, art_.schedule, DataCentricPath::spectral);
      for (std::size_t t = 1; t <= m.steps(); ++t) art_.fitted.push_back(m.targets(t));
      model_ = std::move(m);
      break;
    }
    case Method::gpr_dist: {
      GprModel m = distribution_centric_model(Dataset{art_.xs, art_.ys}, art_.params, art_.schedule,
                                              art_.schedule.steps());
      art_.fitted.push_back(m.alpha_weights());
      model_ = std::move(m);
      break;
    }
    case Method::gpc:
    case Method::gpc_data:
    case Method::gpc_dist:
    case Method::gpc_dist_scaled: {
      const BinaryDataset data{art_.xs, art_.ys};
      std::vector<GpcModel> models;
      if (art_.method == Method::gpc) {
        models.push_back(fit_gpc(data, art_.params, Likelihood::bernoulli,
                                 art_.reg_gammas && !art_.reg_gammas->empty() ? art_.reg_gammas->front() : 0.0));
      } else if (art_.method == Method::gpc_data) {
        GpcDistillConfig cfg;
        cfg.steps = art_.steps;
        cfg.target_kind = art_.target_kind;
        cfg.reg_gammas = art_.reg_gammas;
        cfg.distill_likelihood = art_.distill_likelihood;
        models = std::move(data_centric_gpc(data, art_.params, cfg).models);
      } else if (art_.method == Method::gpc_dist) {
        models = distribution_centric_gpc_iterated(data, art_.params, art_.steps);
      } else {
        models.push_back(distribution_centric_gpc_scaled(data, art_.params, art_.steps));
      }
      for (const auto& m : models) art_.fitted.push_back(m.fit().f_hat);
      model_ = std::move(models);
      break;
    }
  }
}

ModelPrediction FittedModel::predict(const Points& xs, ProbabilityMethod method) const {
  ModelPrediction p;
  if (const auto* models = std::get_if<std::vector<GpcModel>>(&model_)) {
    const GpcModel& last = models->back();
    auto [mean, var] = last.predict_marginals(xs);
    p.mean = std::move(mean);
    p.variance = std::move(var);
    Eigen::VectorXd prob(p.mean.size());
    for (Eigen::Index i = 0; i < prob.size(); ++i) prob(i) = class_probability(p.mean(i), p.variance(i), method);
    p.probability = std::move(prob);
  } else {
    Prediction g;
    if (const auto* m = std::get_if<GprModel>(&model_))
      g = m->predict(xs);
    else
      g = std::get<DataCentricGpr>(model_).predict(xs, art_.schedule.steps());
    p.mean = std::move(g.mean);
    p.variance = g.cov.diagonal();
  }
  const Eigen::ArrayXd sd = p.variance.array().sqrt();
  p.lower = (p.mean.array() - kZ975 * sd).matrix();
  p.upper = (p.mean.array() + kZ975 * sd).matrix();
  return p;
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string artifact_to_json(const ModelArtifact& art) {
  json j;
  j["format"] = "gpdistill-model";
  j["format_version"] = kArtifactFormatVersion;
  j["method"] = to_string(art.method);
  j["kernel"] = {{"type", "rbf"},
                 {"signal_variance", art.params.signal_variance},
                 {"length_scale", art.params.length_scale},
                 {"jitter", art.params.jitter}};
  switch (art.method) {
    case Method::gpr:
      j["noise"] = art.noise;
      break;
    case Method::gpr_data:
    case Method::gpr_dist:
      j["schedule"] = art.schedule.gammas;
      break;
    case Method::gpc:
      break;
    case Method::gpc_data:
      j["target_kind"] = to_string(art.target_kind);
      j["distill_likelihood"] = to_string(art.distill_likelihood);
      [[fallthrough]];
    case Method::gpc_dist:
    case Method::gpc_dist_scaled:
      j["steps"] = art.steps;
      break;
  }
  if (art.reg_gammas) j["reg_gammas"] = *art.reg_gammas;
  json xs = json::array();
  for (Eigen::Index i = 0; i < art.xs.rows(); ++i) xs.push_back(vec_to_json(art.xs.row(i).transpose()));
  j["data"] = {{"xs", std::move(xs)}, {"ys", vec_to_json(art.ys)}};
  json fitted = json::array();
  for (const auto& v : art.fitted) fitted.push_back(vec_to_json(v));
  j["fitted"] = std::move(fitted);
  return j.dump(1);
}

ModelArtifact artifact_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "gpdistill-model") throw ParseError("not a gpdistill model file");
    const int version = j.at("format_version").get<int>();
    if (version != kArtifactFormatVersion)
      throw ParseError("unsupported model format version " + std::to_string(version) + " (expected " +
                       std::to_string(kArtifactFormatVersion) + ")");
    ModelArtifact art;
    try {
      art.method = parse_method(j.at("method").get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
    const json& k = j.at("kernel");
    if (k.at("type").get<std::string>() != "rbf") throw ParseError("unsupported kernel type");
    art.params = KernelParams{k.at("signal_variance").get<double>(), k.at("length_scale").get<double>(),
                              k.at("jitter").get<double>()};
    if (j.contains("noise")) art.noise = j["noise"].get<double>();
    if (j.contains("schedule")) art.schedule.gammas = j["schedule"].get<std::vector<double>>();
    if (j.contains("steps")) art.steps = j["steps"].get<int>();
    if (j.contains("target_kind")) art.target_kind = parse_target_kind(j["target_kind"].get<std::string>());
    if (j.contains("distill_likelihood")) {
      const auto s = j["distill_likelihood"].get<std::string>();
      if (s == "bernoulli")
        art.distill_likelihood = Likelihood::bernoulli;
      else if (s == "continuous_bernoulli")
        art.distill_likelihood = Likelihood::continuous_bernoulli;
      else
        throw ParseError("unknown likelihood '" + s + "'");
    }
    if (j.contains("reg_gammas")) art.reg_gammas = j["reg_gammas"].get<std::vector<double>>();
    const json& xs = j.at("data").at("xs");
    art.ys = vec_from_json(j.at("data").at("ys"));
    if (!xs.is_array() || xs.size() != static_cast<std::size_t>(art.ys.size()) || xs.empty())
      throw ParseError("data.xs and data.ys disagree in length");
    const std::size_t dim = xs.at(0).size();
    art.xs.resize(art.ys.size(), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Eigen::VectorXd row = vec_from_json(xs[i]);
      if (static_cast<std::size_t>(row.size()) != dim) throw ParseError("ragged data.xs");
      art.xs.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    for (const auto& f : j.at("fitted")) art.fitted.push_back(vec_from_json(f));
    return art;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const FittedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << artifact_to_json(model.artifact()) << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ModelArtifact stored = artifact_from_json(ss.str());
  const std::vector<Eigen::VectorXd> fitted = stored.fitted;

  std::optional<FittedModel> model;
  try {
    model.emplace(std::move(stored));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model file has invalid settings: ") + e.what());
  }
  const auto& refit = model->artifact().fitted;
  if (refit.size() != fitted.size())
    throw ParseError("model file lists " + std::to_string(fitted.size()) + " fitted vectors, expected " +
                     std::to_string(refit.size()));
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    if (fitted[i].size() != refit[i].size()) throw ParseError("fitted vector " + std::to_string(i) + " has wrong length");
    const double scale = 1.0 + refit[i].cwiseAbs().maxCoeff();
    if ((fitted[i] - refit[i]).cwiseAbs().maxCoeff() > 1e-9 * scale)
      throw ParseError("fitted vector " + std::to_string(i) + " does not match the stored data and settings");
  }
  return std::move(*model);
}

}  // namespace gpdistill
