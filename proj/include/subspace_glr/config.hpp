#pragma once

#include <filesystem>
#include <string>

#include "subspace_glr/montecarlo.hpp"

namespace subspace_glr {

/// Parses an experiment description. Syntax errors report line and column;
/// schema errors report the JSON pointer of the offending field. Unknown keys
/// are rejected. The result is validated before it is returned.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fully resolved config with every default written out. Parsing the output
/// gives back an identical config.
std::string experiment_config_to_json(const ExperimentConfig& cfg, int indent = 2);

}  // namespace subspace_glr
