#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imids/config.hpp"

namespace imids::cli {

struct RunArtifacts {
  std::filesystem::path metrics_csv;
  std::filesystem::path summary_json;
  std::vector<std::filesystem::path> charts;
};

RunArtifacts cmd_run(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// IMIDS and ITIDS arms on the same seed and attack traffic.
RunArtifacts cmd_compare(const ScenarioConfig& config, const std::filesystem::path& out_dir);

enum class SweepAxis { NodeCount, Attackers, Mode };
SweepAxis parse_axis(const std::string& s);  // throws ConfigError

struct SweepOptions {
  SweepAxis axis = SweepAxis::NodeCount;
  std::vector<std::string> values;
  std::vector<Mode> modes{Mode::Imids, Mode::ImidsNoSectors};  // ignored on the mode axis
  int replicates = 1;  // replicate r runs with seed + r
  int jobs = 0;        // 0: hardware concurrency
};

/// Cross product of values x modes x replicates; long-form CSV plus an
/// energy chart.
RunArtifacts cmd_sweep(const ScenarioConfig& config, const SweepOptions& options,
                       const std::filesystem::path& out_dir);

}  // namespace imids::cli
