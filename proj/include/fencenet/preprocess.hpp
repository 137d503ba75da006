#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fencenet/pose.hpp"
#include "fencenet/random.hpp"

namespace fencenet {

enum class KeypointSet {
  default9,  // front wrist/elbow/shoulder, both hips, knees, ankles
  full13,    // every canonical joint
  lower6,    // both hips, knees, ankles
};

enum class SamplingPolicy { stride, random };
enum class PaddingMode { sample, zero_pad };
enum class Transform { forward, reversed, shuffled };

std::string_view to_string(KeypointSet v);
std::string_view to_string(SamplingPolicy v);
std::string_view to_string(PaddingMode v);
std::string_view to_string(Transform v);
KeypointSet keypoint_set_from_string(std::string_view s);
SamplingPolicy sampling_policy_from_string(std::string_view s);
PaddingMode padding_mode_from_string(std::string_view s);
Transform transform_from_string(std::string_view s);

// Joints of a keypoint set in canonical order.
std::vector<Joint> keypoint_joints(KeypointSet set, Side front);
int keypoint_channels(KeypointSet set);

struct PreprocessConfig {
  KeypointSet keypoints = KeypointSet::default9;
  SamplingPolicy sampling = SamplingPolicy::stride;
  PaddingMode padding = PaddingMode::sample;
  Transform transform = Transform::forward;
  int window = 28;
  int max_samples = 10;
  int max_offset = 20;
  // Zero-pad target length; 0 means "resolve from the training split".
  int pad_length = 0;
};

void to_json(nlohmann::json& j, const PreprocessConfig& config);
void from_json(const nlohmann::json& j, PreprocessConfig& config);

// A fixed-length model input cut from one video.
struct WindowSample {
  std::string video_id;
  int start_offset = 0;
  int label = 0;
  int channels = 0;
  int length = 0;
  std::vector<float> data;  // [channels][length]; channel 2k is x and 2k+1 is y of joint k
};

// Scaled positions: every coordinate minus the nose at frame 0, divided by the
// vertical nose-to-front-ankle distance at frame 0 (one scale for both axes).
// `frames` is [num_frames][num_joints][2]. Throws DataError naming `video_id`
// when that distance is below 1e-6.
std::vector<double> normalize_window(std::span<const double> frames, std::size_t num_frames, std::size_t num_joints,
                                     std::size_t nose_index, std::size_t front_ankle_index,
                                     std::string_view video_id);

// Explicit front_side wins. Otherwise the front is the side whose ankle at the
// first frame reaches farthest from the hip midpoint along the net hip motion over
// [start, start + length); SB moves backwards, so its direction is negated.
Side resolve_front_side(const PoseSequence& seq, std::size_t start, std::size_t length);

// Number of windows the stride policy yields for a video of `num_frames`.
int stride_sample_count(int num_frames, int window = 28, int max_samples = 10, int max_offset = 20);

// stride: offsets 0, 2, 4, ... up to min(max_offset - 1, T - window), at most max_samples.
// random: distinct offsets drawn uniformly from [0, min(max_offset, T - window)], at most max_samples.
// Throws DataError when the video is shorter than the window.
std::vector<int> window_offsets(const PoseSequence& seq, const PreprocessConfig& config, Rng& rng);

// Cuts and normalizes one window, keeping the configured joints. No transform is applied.
WindowSample make_window(const PoseSequence& seq, int start, const PreprocessConfig& config);

// Windows for one video under the config's sampling policy, each transformed.
// All randomness is derived from (seed, video_id).
std::vector<WindowSample> sample_windows(const PoseSequence& seq, const PreprocessConfig& config, std::uint64_t seed);

// Whole video normalized against frame 0 and zero-filled up to `length` frames
// (videos longer than `length` are truncated).
WindowSample zero_pad_sample(const PoseSequence& seq, const PreprocessConfig& config, int length);

// Longest video among `indices`, rounded up to a multiple of the window length.
int zero_pad_target(const Dataset& dataset, std::span<const std::size_t> indices, int window = 28);

void apply_transform(WindowSample& sample, Transform transform, Rng& rng);

// sample_windows or a single zero_pad_sample depending on config.padding.
std::vector<WindowSample> build_samples(const PoseSequence& seq, const PreprocessConfig& config, std::uint64_t seed);

}  // namespace fencenet
