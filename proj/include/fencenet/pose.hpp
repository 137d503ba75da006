#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fencenet {

inline constexpr int kNumClasses = 6;

// Class order is fixed; vote tie-breaking and report columns depend on it.
enum class Action { R = 0, IS, WW, JS, SF, SB };

inline constexpr std::array<Action, kNumClasses> kAllActions = {Action::R,  Action::IS, Action::WW,
                                                                Action::JS, Action::SF, Action::SB};

std::string_view action_name(Action action);
std::string_view action_name(int class_index);
Action action_from_string(std::string_view name);

inline constexpr std::size_t kNumJoints = 13;

enum class Joint : std::size_t {
  nose = 0,
  l_shoulder,
  r_shoulder,
  l_elbow,
  r_elbow,
  l_wrist,
  r_wrist,
  l_hip,
  r_hip,
  l_knee,
  r_knee,
  l_ankle,
  r_ankle,
};

inline constexpr std::array<std::string_view, kNumJoints> kCanonicalJoints = {
    "nose", "l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_wrist", "r_wrist",
    "l_hip", "r_hip", "l_knee", "r_knee", "l_ankle", "r_ankle"};

enum class Side { left, right };

std::string_view side_name(Side side);

// One video's 2D skeleton track. Coordinates are pixels; a missing joint is NaN.
struct PoseSequence {
  std::string video_id;
  int fencer_id = 0;
  Action action = Action::R;
  double fps = 30.0;
  std::size_t num_frames = 0;
  std::vector<double> coords;  // [num_frames][kNumJoints][2], row-major
  std::optional<Side> front_side;

  double x(std::size_t t, Joint j) const { return coords[(t * kNumJoints + static_cast<std::size_t>(j)) * 2]; }
  double y(std::size_t t, Joint j) const { return coords[(t * kNumJoints + static_cast<std::size_t>(j)) * 2 + 1]; }
  double& x(std::size_t t, Joint j) { return coords[(t * kNumJoints + static_cast<std::size_t>(j)) * 2]; }
  double& y(std::size_t t, Joint j) { return coords[(t * kNumJoints + static_cast<std::size_t>(j)) * 2 + 1]; }

  int label() const { return static_cast<int>(action); }
};

using Dataset = std::vector<PoseSequence>;

// JSON-lines manifest, one PoseSequence per line. Keys: video_id, fencer_id, action,
// fps, joints (the 13 canonical names in order), frames (T arrays of 13 [x, y]
// pairs, null pairs for missing joints), optional front_side.
nlohmann::json pose_to_json(const PoseSequence& seq);
// `context` is prefixed to error messages (e.g. "manifest.jsonl:12").
PoseSequence pose_from_json(const nlohmann::json& j, const std::string& context = "");

// Throws DataError("manifest not found: ...") when the file is missing, and a
// DataError naming the line for any malformed record. Blank lines are skipped.
Dataset read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace fencenet
