#include "fencenet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fencenet/errors.hpp"

namespace fencenet {

namespace {

constexpr double kMinScale = 1e-6;

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, const char* what) {
  for (auto v : values) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

double hip_mid_x(const PoseSequence& seq, std::size_t t) {
  return 0.5 * (seq.x(t, Joint::l_hip) + seq.x(t, Joint::r_hip));
}

void check_present(const PoseSequence& seq, std::size_t begin, std::size_t end) {
  for (std::size_t t = begin; t < end; ++t) {
    for (std::size_t k = 0; k < kNumJoints * 2; ++k) {
      if (!std::isfinite(seq.coords[t * kNumJoints * 2 + k])) {
        throw DataError("video " + seq.video_id + " has a missing joint (" +
                        std::string(kCanonicalJoints[k / 2]) + ") at frame " + std::to_string(t));
      }
    }
  }
}

// Normalizes frames [start, start + used) and writes the selected joints into a
// [channels][length] buffer; frames past `used` stay zero.
WindowSample assemble(const PoseSequence& seq, std::size_t start, std::size_t used, std::size_t length,
                      const PreprocessConfig& config) {
  check_present(seq, start, start + used);
  const Side front = resolve_front_side(seq, start, used);
  const Joint front_ankle = front == Side::left ? Joint::l_ankle : Joint::r_ankle;
  const std::span<const double> frames(seq.coords.data() + start * kNumJoints * 2, used * kNumJoints * 2);
  const auto normalized = normalize_window(frames, used, kNumJoints, static_cast<std::size_t>(Joint::nose),
                                           static_cast<std::size_t>(front_ankle), seq.video_id);

  const auto joints = keypoint_joints(config.keypoints, front);
  WindowSample sample;
  sample.video_id = seq.video_id;
  sample.start_offset = static_cast<int>(start);
  sample.label = seq.label();
  sample.channels = static_cast<int>(joints.size() * 2);
  sample.length = static_cast<int>(length);
  sample.data.assign(joints.size() * 2 * length, 0.0f);
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const auto j = static_cast<std::size_t>(joints[k]);
    for (std::size_t t = 0; t < used; ++t) {
      sample.data[(2 * k) * length + t] = static_cast<float>(normalized[(t * kNumJoints + j) * 2]);
      sample.data[(2 * k + 1) * length + t] = static_cast<float>(normalized[(t * kNumJoints + j) * 2 + 1]);
    }
  }
  return sample;
}

}  // namespace

std::string_view to_string(KeypointSet v) {
  switch (v) {
    case KeypointSet::default9: return "default9";
    case KeypointSet::full13: return "full13";
    case KeypointSet::lower6: return "lower6";
  }
  return "?";
}

std::string_view to_string(SamplingPolicy v) {
  return v == SamplingPolicy::stride ? "stride" : "random";
}

std::string_view to_string(PaddingMode v) {
  return v == PaddingMode::sample ? "sample" : "zero_pad";
}

std::string_view to_string(Transform v) {
  switch (v) {
    case Transform::forward: return "forward";
    case Transform::reversed: return "reversed";
    case Transform::shuffled: return "shuffled";
  }
  return "?";
}

KeypointSet keypoint_set_from_string(std::string_view s) {
  return parse_enum(s, std::array{KeypointSet::default9, KeypointSet::full13, KeypointSet::lower6}, "keypoint set");
}

SamplingPolicy sampling_policy_from_string(std::string_view s) {
  return parse_enum(s, std::array{SamplingPolicy::stride, SamplingPolicy::random}, "sampling policy");
}

PaddingMode padding_mode_from_string(std::string_view s) {
  return parse_enum(s, std::array{PaddingMode::sample, PaddingMode::zero_pad}, "padding mode");
}

Transform transform_from_string(std::string_view s) {
  return parse_enum(s, std::array{Transform::forward, Transform::reversed, Transform::shuffled}, "transform");
}

std::vector<Joint> keypoint_joints(KeypointSet set, Side front) {
  const bool left = front == Side::left;
  switch (set) {
    case KeypointSet::default9:
      return {left ? Joint::l_shoulder : Joint::r_shoulder,
              left ? Joint::l_elbow : Joint::r_elbow,
              left ? Joint::l_wrist : Joint::r_wrist,
              Joint::l_hip, Joint::r_hip, Joint::l_knee, Joint::r_knee, Joint::l_ankle, Joint::r_ankle};
    case KeypointSet::full13: {
      std::vector<Joint> all;
      for (std::size_t j = 0; j < kNumJoints; ++j) all.push_back(static_cast<Joint>(j));
      return all;
    }
    case KeypointSet::lower6:
      return {Joint::l_hip, Joint::r_hip, Joint::l_knee, Joint::r_knee, Joint::l_ankle, Joint::r_ankle};
  }
  return {};
}

int keypoint_channels(KeypointSet set) {
  return static_cast<int>(keypoint_joints(set, Side::right).size() * 2);
}

void to_json(nlohmann::json& j, const PreprocessConfig& c) {
  j = {{"keypoints", std::string(to_string(c.keypoints))},
       {"sampling", std::string(to_string(c.sampling))},
       {"padding", std::string(to_string(c.padding))},
       {"transform", std::string(to_string(c.transform))},
       {"window", c.window},
       {"max_samples", c.max_samples},
       {"max_offset", c.max_offset},
       {"pad_length", c.pad_length}};
}

void from_json(const nlohmann::json& j, PreprocessConfig& c) {
  try {
    PreprocessConfig out;
    if (j.contains("keypoints")) out.keypoints = keypoint_set_from_string(j["keypoints"].get<std::string>());
    if (j.contains("sampling")) out.sampling = sampling_policy_from_string(j["sampling"].get<std::string>());
    if (j.contains("padding")) out.padding = padding_mode_from_string(j["padding"].get<std::string>());
    if (j.contains("transform")) out.transform = transform_from_string(j["transform"].get<std::string>());
    out.window = j.value("window", out.window);
    out.max_samples = j.value("max_samples", out.max_samples);
    out.max_offset = j.value("max_offset", out.max_offset);
    out.pad_length = j.value("pad_length", out.pad_length);
    if (out.window < 1 || out.max_samples < 1 || out.max_offset < 1 || out.pad_length < 0) {
      throw ConfigError("preprocess window, max_samples and max_offset must be positive");
    }
    c = out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed preprocess config: ") + e.what());
  }
}

std::vector<double> normalize_window(std::span<const double> frames, std::size_t num_frames, std::size_t num_joints,
                                     std::size_t nose_index, std::size_t front_ankle_index,
                                     std::string_view video_id) {
  if (num_frames == 0 || frames.size() != num_frames * num_joints * 2) {
    throw DimensionError("normalize_window: frame buffer does not match " + std::to_string(num_frames) + " x " +
                         std::to_string(num_joints) + " x 2");
  }
  const double nose_x = frames[nose_index * 2];
  const double nose_y = frames[nose_index * 2 + 1];
  const double scale = std::abs(nose_y - frames[front_ankle_index * 2 + 1]);
  if (!(scale > kMinScale)) {
    throw DataError("video " + std::string(video_id) + ": degenerate scale (nose-to-front-ankle height " +
                    std::to_string(scale) + ")");
  }
  std::vector<double> out(frames.size());
  for (std::size_t i = 0; i < frames.size(); i += 2) {
    out[i] = (frames[i] - nose_x) / scale;
    out[i + 1] = (frames[i + 1] - nose_y) / scale;
  }
  return out;
}

Side resolve_front_side(const PoseSequence& seq, std::size_t start, std::size_t length) {
  if (seq.front_side) return *seq.front_side;
  const std::size_t last = start + std::max<std::size_t>(length, 1) - 1;
  const double motion = hip_mid_x(seq, last) - hip_mid_x(seq, start);
  double direction = motion < 0.0 ? -1.0 : 1.0;
  if (seq.action == Action::SB) direction = -direction;
  const double hip = hip_mid_x(seq, start);
  const double left_reach = (seq.x(start, Joint::l_ankle) - hip) * direction;
  const double right_reach = (seq.x(start, Joint::r_ankle) - hip) * direction;
  return left_reach > right_reach ? Side::left : Side::right;
}

int stride_sample_count(int num_frames, int window, int max_samples, int max_offset) {
  if (num_frames < window) return 0;
  const int last = std::min(max_offset - 1, num_frames - window);
  return std::min(max_samples, last / 2 + 1);
}

std::vector<int> window_offsets(const PoseSequence& seq, const PreprocessConfig& config, Rng& rng) {
  const int frames = static_cast<int>(seq.num_frames);
  if (frames < config.window) {
    throw DataError("video " + seq.video_id + " has " + std::to_string(frames) + " frames, fewer than the window of " +
                    std::to_string(config.window));
  }
  std::vector<int> offsets;
  if (config.sampling == SamplingPolicy::stride) {
    const int last = std::min(config.max_offset - 1, frames - config.window);
    for (int o = 0; o <= last && static_cast<int>(offsets.size()) < config.max_samples; o += 2) offsets.push_back(o);
  } else {
    const int last = std::min(config.max_offset, frames - config.window);
    std::vector<int> candidates(static_cast<std::size_t>(last + 1));
    std::iota(candidates.begin(), candidates.end(), 0);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(config.max_samples)));
    std::sort(candidates.begin(), candidates.end());
    offsets = std::move(candidates);
  }
  return offsets;
}

WindowSample make_window(const PoseSequence& seq, int start, const PreprocessConfig& config) {
  if (start < 0 || static_cast<std::size_t>(start + config.window) > seq.num_frames) {
    throw DataError("video " + seq.video_id + ": window at " + std::to_string(start) + " runs past frame " +
                    std::to_string(seq.num_frames));
  }
  const auto len = static_cast<std::size_t>(config.window);
  return assemble(seq, static_cast<std::size_t>(start), len, len, config);
}

std::vector<WindowSample> sample_windows(const PoseSequence& seq, const PreprocessConfig& config, std::uint64_t seed) {
  auto offset_rng = derive_rng(seed, "offsets:" + seq.video_id);
  std::vector<WindowSample> samples;
  for (int offset : window_offsets(seq, config, offset_rng)) {
    auto sample = make_window(seq, offset, config);
    auto transform_rng = derive_rng(seed, "transform:" + seq.video_id, static_cast<std::uint64_t>(offset));
    apply_transform(sample, config.transform, transform_rng);
    samples.push_back(std::move(sample));
  }
  return samples;
}

WindowSample zero_pad_sample(const PoseSequence& seq, const PreprocessConfig& config, int length) {
  if (length < 1) throw ArgumentError("zero-pad length must be positive");
  const auto used = std::min<std::size_t>(seq.num_frames, static_cast<std::size_t>(length));
  return assemble(seq, 0, used, static_cast<std::size_t>(length), config);
}

int zero_pad_target(const Dataset& dataset, std::span<const std::size_t> indices, int window) {
  std::size_t longest = 0;
  for (auto i : indices) longest = std::max(longest, dataset.at(i).num_frames);
  const auto w = static_cast<std::size_t>(window);
  return static_cast<int>(std::max<std::size_t>(1, (longest + w - 1) / w) * w);
}

void apply_transform(WindowSample& sample, Transform transform, Rng& rng) {
  if (transform == Transform::forward) return;
  const auto length = static_cast<std::size_t>(sample.length);
  std::vector<std::size_t> order(length);
  std::iota(order.begin(), order.end(), 0);
  if (transform == Transform::reversed) {
    std::reverse(order.begin(), order.end());
  } else {
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<float> out(sample.data.size());
  for (std::size_t c = 0; c < static_cast<std::size_t>(sample.channels); ++c) {
    for (std::size_t t = 0; t < length; ++t) out[c * length + t] = sample.data[c * length + order[t]];
  }
  sample.data = std::move(out);
}

std::vector<WindowSample> build_samples(const PoseSequence& seq, const PreprocessConfig& config, std::uint64_t seed) {
  if (config.padding == PaddingMode::sample) return sample_windows(seq, config, seed);
  if (config.pad_length < 1) throw ConfigError("zero_pad mode needs a resolved pad_length");
  auto sample = zero_pad_sample(seq, config, config.pad_length);
  auto rng = derive_rng(seed, "transform:" + seq.video_id);
  apply_transform(sample, config.transform, rng);
  return {std::move(sample)};
}

}  // namespace fencenet
