#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "riesz_ep/harness.hpp"
#include "riesz_ep/solver.hpp"

namespace riesz_ep {

/// Raw "section.key" -> value text from a flat TOML-style file. Top-level keys have no prefix.
/// Supports comments, [section] headers, numbers, booleans, "strings" and one-line [arrays].
using RawConfig = std::map<std::string, std::string>;

/// Throws ConfigError with the line number on malformed input or a repeated key.
RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::filesystem::path& path);

/// Applies raw values on top of the defaults. Unknown keys and bad values throw ConfigError.
VerifyConfig verify_config_from(const RawConfig& raw);
/// Scenario part only; keys of the [verify] section are rejected.
ScenarioConfig scenario_config_from(const RawConfig& raw);

VerifyConfig load_verify_config(const std::filesystem::path& path);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Scenario rules plus ladder and tolerance sanity; throws ConfigError. Returns scenario warnings.
std::vector<std::string> validate(const VerifyConfig& config);

/// Every accepted key with its default and meaning, one per line (for --help).
std::string config_key_help();
/// Fully resolved config in the same file format; parsing it back yields the same values.
std::string render_config(const VerifyConfig& config);

}  // namespace riesz_ep
