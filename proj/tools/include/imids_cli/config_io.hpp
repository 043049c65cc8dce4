#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "imids/config.hpp"

namespace imids::cli {

using nlohmann::json;

json config_to_json(const ScenarioConfig& config);

/// Strict decoding: unknown keys and mistyped values raise ConfigError.
/// Missing keys keep their defaults. Does not validate.
ScenarioConfig config_from_json(const json& j);

/// Applies `path.to.key=value`. The value is parsed as JSON when it can
/// be (numbers, booleans, arrays), otherwise taken as a string.
void apply_override(json& j, std::string_view assignment);

/// Reads, overrides, decodes and validates a scenario file.
ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace imids::cli
