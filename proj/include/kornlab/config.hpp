#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kornlab/constraints.hpp"
#include "kornlab/constructions.hpp"
#include "kornlab/geometry.hpp"
#include "kornlab/grid.hpp"
#include "kornlab/killing.hpp"

namespace kornlab {

enum class Task { KornConstant, Killing, Counterexample, Lemmas, Poincare, Trace, Sweep };

Task parse_task(const std::string& s);
std::string to_string(Task t);

/// A validated experiment. `normalized` is the config with every default
/// filled in; its canonical dump is what the hash covers.
struct ExperimentConfig {
  Task task = Task::KornConstant;
  Hypersurface surface = Hypersurface::circle();
  ThicknessProfile profile;
  double h = 0.1;
  bool has_h = false;
  Resolution resolution;
  ConstraintSpec scenario;
  std::vector<double> h_list;
  std::vector<std::uint64_t> seeds;
  std::string field = "extend";         // counterexample: extend | trivial
  Task sweep_task = Task::KornConstant;  // quantity a sweep measures
  KillingPolicy killing;
  MollifierSpec mollifier;
  std::filesystem::path output = "out";
  nlohmann::json normalized;

  /// SHA-256 (hex) of the normalized config without the output directory.
  std::string hash() const;
  ShellDomain shell(double h_value) const;
  /// h of a single-shell task, or each entry of h_list.
  std::vector<double> h_values() const;
};

/// Validates and normalizes; throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

Hypersurface parse_surface(const nlohmann::json& j);
ThicknessProfile parse_profile(const nlohmann::json& j, const Hypersurface& surface);

}  // namespace kornlab
