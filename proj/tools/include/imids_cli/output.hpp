#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imids/engine.hpp"

namespace imids::cli {

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-tripping decimal rendering (period separator).
std::string format_number(double v);

std::string metrics_csv(const SimulationTrace& trace);

/// First round with fewer nodes alive than after initialization.
std::optional<int> lifetime(const SimulationTrace& trace);
double total_energy(const SimulationTrace& trace);  // initialization + rounds

nlohmann::json summary_json(const SimulationTrace& trace);

/// Quarantine and suspicion ledgers plus per-round reconfiguration events.
nlohmann::json ledgers_json(const SimulationTrace& trace);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<double> y_min;  // fixed axis bounds; data-driven otherwise
  std::optional<double> y_max;
};

/// Self-contained polyline chart with axis ticks and a legend.
std::string render_line_chart(const ChartSpec& spec, const std::vector<Series>& series);

}  // namespace imids::cli
