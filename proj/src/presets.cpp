#include "fencenet/presets.hpp"

#include <algorithm>
#include <fstream>
#include <string_view>
#include <utility>

#include "fencenet/errors.hpp"

namespace fencenet {

namespace detail {
extern const std::vector<std::pair<std::string_view, std::string_view>> kBundledPresets;
}

namespace {

ExperimentConfig parse_experiment(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  try {
    return j.get<ExperimentConfig>();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::kBundledPresets) names.emplace_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

ExperimentConfig load_preset(const std::string& name, const std::filesystem::path& preset_dir) {
  if (!preset_dir.empty()) {
    const auto path = preset_dir / (name + ".json");
    if (!std::filesystem::exists(path)) throw ConfigError("unknown preset '" + name + "' in " + preset_dir.string());
    return load_experiment_file(path);
  }
  for (const auto& [preset, text] : detail::kBundledPresets) {
    if (preset == name) return parse_experiment(std::string(text), "preset " + name);
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

ExperimentConfig load_experiment_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config not found: " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_experiment(text, path.string());
}

}  // namespace fencenet
