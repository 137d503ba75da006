#include "fencenet/pose.hpp"

#include <fstream>
#include <limits>

#include "fencenet/errors.hpp"

namespace fencenet {

namespace {

constexpr std::array<std::string_view, kNumClasses> kActionNames = {"R", "IS", "WW", "JS", "SF", "SB"};

}  // namespace

std::string_view action_name(Action action) {
  return kActionNames[static_cast<std::size_t>(action)];
}

std::string_view action_name(int class_index) {
  if (class_index < 0 || class_index >= kNumClasses) throw ArgumentError("class index out of range");
  return kActionNames[static_cast<std::size_t>(class_index)];
}

Action action_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == name) return static_cast<Action>(i);
  }
  throw DataError("unknown action '" + std::string(name) + "'");
}

std::string_view side_name(Side side) {
  return side == Side::left ? "left" : "right";
}

nlohmann::json pose_to_json(const PoseSequence& seq) {
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t t = 0; t < seq.num_frames; ++t) {
    nlohmann::json frame = nlohmann::json::array();
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double x = seq.coords[(t * kNumJoints + j) * 2];
      const double y = seq.coords[(t * kNumJoints + j) * 2 + 1];
      if (std::isnan(x) || std::isnan(y)) {
        frame.push_back({nullptr, nullptr});
      } else {
        frame.push_back({x, y});
      }
    }
    frames.push_back(std::move(frame));
  }
  nlohmann::json j = {{"video_id", seq.video_id},
                      {"fencer_id", seq.fencer_id},
                      {"action", std::string(action_name(seq.action))},
                      {"fps", seq.fps},
                      {"joints", kCanonicalJoints},
                      {"frames", std::move(frames)}};
  if (seq.front_side) j["front_side"] = std::string(side_name(*seq.front_side));
  return j;
}

PoseSequence pose_from_json(const nlohmann::json& j, const std::string& context) {
  const std::string where = context.empty() ? std::string("record") : context;
  auto fail = [&](const std::string& what) -> DataError { return DataError(where + ": " + what); };
  if (!j.is_object()) throw fail("expected a JSON object");

  PoseSequence seq;
  try {
    seq.video_id = j.at("video_id").get<std::string>();
    seq.fencer_id = j.at("fencer_id").get<int>();
    try {
      seq.action = action_from_string(j.at("action").get<std::string>());
    } catch (const DataError& e) {
      throw fail(e.what());
    }
    seq.fps = j.at("fps").get<double>();
    const auto& joints = j.at("joints");
    if (!joints.is_array() || joints.size() != kNumJoints) throw fail("joints must list the 13 canonical names");
    for (std::size_t i = 0; i < kNumJoints; ++i) {
      if (joints[i].get<std::string>() != kCanonicalJoints[i]) {
        throw fail("joint " + std::to_string(i) + " is '" + joints[i].get<std::string>() + "', expected '" +
                   std::string(kCanonicalJoints[i]) + "'");
      }
    }
    if (j.contains("front_side") && !j["front_side"].is_null()) {
      const auto side = j["front_side"].get<std::string>();
      if (side == "left") {
        seq.front_side = Side::left;
      } else if (side == "right") {
        seq.front_side = Side::right;
      } else if (side != "auto") {
        throw fail("front_side must be left, right or auto");
      }
    }
    const auto& frames = j.at("frames");
    if (!frames.is_array() || frames.empty()) throw fail("video " + seq.video_id + " has no frames");
    seq.num_frames = frames.size();
    seq.coords.reserve(seq.num_frames * kNumJoints * 2);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const auto& frame = frames[t];
      if (!frame.is_array() || frame.size() != kNumJoints) {
        throw fail("video " + seq.video_id + " frame " + std::to_string(t) + " does not have 13 joints");
      }
      for (const auto& pair : frame) {
        if (pair.is_null() || (pair.is_array() && pair.size() == 2 && pair[0].is_null() && pair[1].is_null())) {
          seq.coords.push_back(nan);
          seq.coords.push_back(nan);
          continue;
        }
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw fail("video " + seq.video_id + " frame " + std::to_string(t) + " has a malformed [x, y] pair");
        }
        seq.coords.push_back(pair[0].get<double>());
        seq.coords.push_back(pair[1].get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (seq.fencer_id < 1) throw fail("fencer_id must be positive");
  if (!(seq.fps > 0.0)) throw fail("fps must be positive");
  return seq;
}

Dataset read_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("manifest not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string context = path.filename().string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(context + ": " + e.what());
    }
    dataset.push_back(pose_from_json(j, context));
  }
  return dataset;
}

void write_manifest(const std::filesystem::path& path, const Dataset& dataset) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  for (const auto& seq : dataset) out << pose_to_json(seq).dump() << '\n';
  if (!out) throw DataError("failed writing manifest " + path.string());
}

}  // namespace fencenet
