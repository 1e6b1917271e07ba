#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kornlab/config.hpp"

namespace kornlab {

inline constexpr const char* kVersion = "0.1.0";

struct RunReport {
  std::string config_hash;
  std::string task;
  std::vector<std::filesystem::path> outputs;  // every file written, report.json last
  nlohmann::json summary;
  nlohmann::json timings;  // seconds per stage; excluded from the numerical outputs
  std::string version = kVersion;

  nlohmann::json to_json() const;
};

/// Executes the task and writes its outputs into config.output. Sweeps
/// cache per-h rows under SweepCache::default_root().
RunReport run(const ExperimentConfig& config);

/// Plan of a run without solving anything: grid sizes, DOF counts,
/// constraint dimensions and the dense solver cost.
std::string describe(const ExperimentConfig& config);

}  // namespace kornlab
