#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lidaraug/pipeline.hpp"

namespace lidaraug {

/// Parses flat `key = value` text on top of the defaults. Angles are given in degrees.
/// Unknown or repeated keys and out-of-range values throw ConfigError.
PipelineConfig parse_config(std::string_view text, const std::string& origin = "<config>");
PipelineConfig read_config(const std::filesystem::path& path);

/// Every key with full round-trip precision.
std::string config_to_text(const PipelineConfig& cfg);
void write_config(const PipelineConfig& cfg, const std::filesystem::path& path);

const std::vector<std::string>& config_keys();

}  // namespace lidaraug
