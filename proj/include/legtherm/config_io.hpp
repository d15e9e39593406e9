#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "legtherm/sim_config.hpp"

namespace legtherm {

inline constexpr std::string_view kConfigFormat = "legtherm-config/1";

/// Parses a JSON configuration. Absent keys keep their defaults; unknown keys, type errors
/// and out-of-range values are reported together in one ValidationError.
SimConfig parse_config(std::string_view json_text);

/// Reads and parses a file. Throws Error(config_error) when it cannot be read.
SimConfig load_config(const std::filesystem::path& path);

/// Complete, deterministic JSON rendering; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& cfg);

std::string read_file(const std::filesystem::path& path);

}  // namespace legtherm
