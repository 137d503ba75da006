#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fencenet/evaluation.hpp"

namespace fencenet {

// Names of the presets compiled into the library, sorted.
std::vector<std::string> preset_names();

// Looks `name` up in `preset_dir` (as <name>.json) when given, else among the
// bundled presets. Throws ConfigError for an unknown name.
ExperimentConfig load_preset(const std::string& name, const std::filesystem::path& preset_dir = {});

// Reads an experiment config file. Throws DataError when it cannot be read.
ExperimentConfig load_experiment_file(const std::filesystem::path& path);

}  // namespace fencenet
