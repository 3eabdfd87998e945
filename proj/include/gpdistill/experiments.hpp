#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gpdistill/bench.hpp"

namespace gpdistill {

struct ExperimentConfig {
  std::string id;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  // Replaces the generated toy data (header x1,...,xd,y).
  std::optional<std::filesystem::path> data_csv;
  BenchConfig bench;  // used by "timing" only
};

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;  // everything written, manifest last
  std::string manifest;                      // JSON text of manifest.json
};

// gpr-data-10step, gpr-dist-10step, gpc-data-cb, gpc-dist-10step,
// grid-search, gpr-noise-ablation, cb-plots, timing
const std::vector<std::string>& experiment_ids();

// Writes CSV files and manifest.json into config.out_dir (created if
// missing). Output is byte-identical for a fixed seed, except for "timing".
ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace gpdistill
