#pragma once

// JSON run configuration with optional "scenario", "learning" and "esn"
// sections. Every field is optional; unknown keys are rejected.

#include "vrnet/harness.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace vrnet {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ScenarioConfig scenario;
    EpisodeOptions episode;
};

/// Throws ConfigError on malformed JSON, unknown keys, wrong types or invalid values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Every field, suitable for parse_config.
std::string config_to_json(const RunConfig& cfg);

}  // namespace vrnet
