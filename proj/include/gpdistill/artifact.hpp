#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gpdistill/gpc_distill.hpp"
#include "gpdistill/gpr.hpp"
#include "gpdistill/gpr_distill.hpp"
#include "gpdistill/laplace.hpp"

namespace gpdistill {

enum class Method { gpr, gpr_data, gpr_dist, gpc, gpc_data, gpc_dist, gpc_dist_scaled };

const char* to_string(Method m);  // "gpr", "gpr-data", ...
Method parse_method(const std::string& s);
bool is_classifier(Method m);

inline constexpr int kArtifactFormatVersion = 1;

// Everything needed to rebuild a fitted model, plus the fitted vectors
// themselves: the GPR weights, the data-centric targets per step, or the
// latent mode per step for the classifiers.
struct ModelArtifact {
  Method method = Method::gpr;
  KernelParams params;
  double noise = 1.0;        // gpr
  DistillSchedule schedule;  // gpr-data, gpr-dist
  int steps = 1;             // gpc-data, gpc-dist, gpc-dist-scaled
  TargetKind target_kind = TargetKind::soft_mean;
  std::optional<std::vector<double>> reg_gammas;
  Likelihood distill_likelihood = Likelihood::continuous_bernoulli;
  Points xs;
  Eigen::VectorXd ys;
  std::vector<Eigen::VectorXd> fitted;
};

struct ModelPrediction {
  Eigen::VectorXd mean;      // latent mean for the classifiers
  Eigen::VectorXd variance;  // marginal variance
  Eigen::VectorXd lower;     // 2.5 percentile
  Eigen::VectorXd upper;     // 97.5 percentile
  std::optional<Eigen::VectorXd> probability;
};

class FittedModel {
 public:
  // Fits the model described by `spec`; any `fitted` vectors in it are
  // replaced.
  explicit FittedModel(ModelArtifact spec);

  const ModelArtifact& artifact() const { return art_; }
  ModelPrediction predict(const Points& xs, ProbabilityMethod method = ProbabilityMethod::quadrature) const;

 private:
  ModelArtifact art_;
  std::variant<GprModel, DataCentricGpr, std::vector<GpcModel>> model_;
};

std::string artifact_to_json(const ModelArtifact& art);
ModelArtifact artifact_from_json(const std::string& text);  // ParseError on bad input

void save_model(const FittedModel& model, const std::filesystem::path& path);

// Rebuilds the model from the stored settings and data and checks that it
// reproduces the stored fitted vectors. Throws ParseError on malformed or
// truncated files, version mismatch, or inconsistent contents.
FittedModel load_model(const std::filesystem::path& path);

}  // namespace gpdistill
