#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "fencenet/errors.hpp"
#include "fencenet/pose.hpp"
#include "fencenet/preprocess.hpp"
#include "fencenet/splits.hpp"
#include "fencenet/synth.hpp"

using namespace fencenet;

namespace {

// Random skeleton track with the nose about 200 px above the ankles at every frame.
PoseSequence random_sequence(std::size_t frames, Rng& rng, const std::string& id = "vid") {
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  PoseSequence seq;
  seq.video_id = id;
  seq.fencer_id = 1;
  seq.action = Action::SF;
  seq.num_frames = frames;
  seq.front_side = Side::right;
  seq.coords.resize(frames * kNumJoints * 2);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      seq.coords[(t * kNumJoints + j) * 2] = 300.0 + u(rng);
      seq.coords[(t * kNumJoints + j) * 2 + 1] = 200.0 + u(rng);
    }
    seq.y(t, Joint::nose) = 100.0 + 0.1 * u(rng);
    seq.y(t, Joint::r_ankle) = 300.0 + 0.1 * u(rng);
    seq.y(t, Joint::l_ankle) = 300.0 + 0.1 * u(rng);
  }
  return seq;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("normalization example") {
  // nose (100, 50), front ankle (120, 250): s = 200, point (120, 250) -> (0.1, 1.0)
  std::vector<double> frame(kNumJoints * 2, 0.0);
  frame[0] = 100;
  frame[1] = 50;
  const auto ankle = static_cast<std::size_t>(Joint::r_ankle);
  frame[ankle * 2] = 120;
  frame[ankle * 2 + 1] = 250;
  const auto out = normalize_window(frame, 1, kNumJoints, 0, ankle, "example");
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[ankle * 2] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(out[ankle * 2 + 1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normalization properties on random windows") {
  Rng rng(1);
  std::uniform_real_distribution<double> shift(-500.0, 500.0);
  std::uniform_real_distribution<double> factor(0.2, 5.0);
  const auto ankle = static_cast<std::size_t>(Joint::r_ankle);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = random_sequence(28, rng);
    const auto base = normalize_window(seq.coords, 28, kNumJoints, 0, ankle, seq.video_id);
    CHECK(base[0] == 0.0);
    CHECK(base[1] == 0.0);

    const double dx = shift(rng), dy = shift(rng), s = factor(rng);
    std::vector<double> moved = seq.coords;
    for (std::size_t i = 0; i < moved.size(); i += 2) {
      moved[i] = s * moved[i] + dx;
      moved[i + 1] = s * moved[i + 1] + dy;
    }
    const auto out = normalize_window(moved, 28, kNumJoints, 0, ankle, seq.video_id);
    for (std::size_t i = 0; i < out.size(); ++i) REQUIRE(out[i] == doctest::Approx(base[i]).epsilon(1e-9));
  }
}

TEST_CASE("normalization rejects a degenerate scale and names the video") {
  std::vector<double> frame(kNumJoints * 2, 7.0);
  try {
    normalize_window(frame, 1, kNumJoints, 0, 12, "flat_video");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("flat_video") != std::string::npos);
  }
}

TEST_CASE("stride sampling counts") {
  CHECK(stride_sample_count(28) == 1);
  CHECK(stride_sample_count(33) == 3);
  CHECK(stride_sample_count(46) == 10);
  CHECK(stride_sample_count(47) == 10);
  CHECK(stride_sample_count(27) == 0);
  for (int t = 28; t <= 120; ++t) {
    const int expected = std::min(10, (t - 28) / 2 + 1);
    CHECK(stride_sample_count(t) == expected);
    CHECK((stride_sample_count(t) < 10) == (t < 46));
  }
}

TEST_CASE("window offsets: stride and random policies") {
  Rng rng(2);
  PreprocessConfig config;
  const auto s33 = random_sequence(33, rng);
  CHECK(window_offsets(s33, config, rng) == std::vector<int>{0, 2, 4});
  const auto s47 = random_sequence(47, rng);
  CHECK(window_offsets(s47, config, rng) == std::vector<int>{0, 2, 4, 6, 8, 10, 12, 14, 16, 18});
  const auto s28 = random_sequence(28, rng);
  CHECK(window_offsets(s28, config, rng) == std::vector<int>{0});
  CHECK_THROWS_AS(window_offsets(random_sequence(27, rng), config, rng), DataError);

  config.sampling = SamplingPolicy::random;
  for (std::size_t frames : {28u, 31u, 40u, 60u, 98u}) {
    const auto seq = random_sequence(frames, rng);
    const auto offsets = window_offsets(seq, config, rng);
    const std::set<int> unique(offsets.begin(), offsets.end());
    CHECK(unique.size() == offsets.size());
    CHECK(offsets.size() <= 10);
    CHECK(offsets.size() == std::min<std::size_t>(10, std::min<std::size_t>(20, frames - 28) + 1));
    for (int o : offsets) {
      CHECK(o >= 0);
      CHECK(o <= std::min(20, static_cast<int>(frames) - 28));
    }
  }
}

TEST_CASE("sampled windows stay inside the video and frame 0 is normalized") {
  Rng rng(3);
  PreprocessConfig config;
  config.keypoints = KeypointSet::full13;
  const auto seq = random_sequence(53, rng);
  const auto windows = sample_windows(seq, config, 0);
  CHECK(windows.size() == 10);
  std::set<int> starts;
  for (const auto& w : windows) {
    CHECK(w.length == 28);
    CHECK(w.channels == 26);
    CHECK(w.data.size() == 26u * 28u);
    CHECK(w.start_offset + 28 <= 53);
    starts.insert(w.start_offset);
    // nose is channel 0/1 in the full set
    CHECK(w.data[0] == 0.0f);
    CHECK(w.data[28] == 0.0f);
    const double scale = std::abs(seq.y(w.start_offset, Joint::nose) - seq.y(w.start_offset, Joint::r_ankle));
    const double expected =
        (seq.x(w.start_offset + 5, Joint::l_knee) - seq.x(w.start_offset, Joint::nose)) / scale;
    const std::size_t knee_channel = 2 * static_cast<std::size_t>(Joint::l_knee);
    CHECK(w.data[knee_channel * 28 + 5] == doctest::Approx(expected).epsilon(1e-6));
  }
  CHECK(starts.size() == windows.size());
}

TEST_CASE("keypoint sets keep canonical order") {
  CHECK(keypoint_channels(KeypointSet::default9) == 18);
  CHECK(keypoint_channels(KeypointSet::full13) == 26);
  CHECK(keypoint_channels(KeypointSet::lower6) == 12);
  const auto right = keypoint_joints(KeypointSet::default9, Side::right);
  CHECK(right == std::vector<Joint>{Joint::r_shoulder, Joint::r_elbow, Joint::r_wrist, Joint::l_hip, Joint::r_hip,
                                    Joint::l_knee, Joint::r_knee, Joint::l_ankle, Joint::r_ankle});
  const auto left = keypoint_joints(KeypointSet::default9, Side::left);
  CHECK(left.front() == Joint::l_shoulder);
  for (auto set : {KeypointSet::default9, KeypointSet::full13, KeypointSet::lower6}) {
    const auto joints = keypoint_joints(set, Side::left);
    CHECK(std::is_sorted(joints.begin(), joints.end()));
  }
}

TEST_CASE("default9 windows select front-side arm joints") {
  Rng rng(4);
  auto seq = random_sequence(28, rng);
  PreprocessConfig config;
  const auto right = make_window(seq, 0, config);
  seq.front_side = Side::left;
  seq.y(0, Joint::l_ankle) = seq.y(0, Joint::r_ankle);
  const auto left = make_window(seq, 0, config);
  CHECK(right.channels == 18);
  // channel 0 is the front shoulder x
  const double scale = std::abs(seq.y(0, Joint::nose) - seq.y(0, Joint::r_ankle));
  CHECK(right.data[0] == doctest::Approx((seq.x(0, Joint::r_shoulder) - seq.x(0, Joint::nose)) / scale));
  CHECK(left.data[0] == doctest::Approx((seq.x(0, Joint::l_shoulder) - seq.x(0, Joint::nose)) / scale));
}

TEST_CASE("front side auto rule on synthetic steps") {
  SynthConfig sc;
  sc.num_fencers = 2;
  sc.reps_per_action = 2;
  auto dataset = synth_generate(sc);
  for (auto& seq : dataset) {
    CHECK(seq.front_side == Side::right);
    seq.front_side.reset();
    CHECK(resolve_front_side(seq, 0, 28) == Side::right);
  }
}

TEST_CASE("missing joints are rejected with video and frame") {
  Rng rng(5);
  auto seq = random_sequence(40, rng, "gappy");
  seq.x(33, Joint::l_knee) = std::numeric_limits<double>::quiet_NaN();
  PreprocessConfig config;
  CHECK_NOTHROW(make_window(seq, 0, config));  // frames 0..27 are complete
  try {
    sample_windows(seq, config, 0);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("gappy") != std::string::npos);
    CHECK(msg.find("frame 33") != std::string::npos);
  }
}

TEST_CASE("zero padding") {
  Rng rng(6);
  PreprocessConfig config;
  const auto full = random_sequence(56, rng);
  const auto same = zero_pad_sample(full, config, 56);
  CHECK(same.length == 56);
  for (std::size_t c = 0; c < 18; ++c) CHECK(same.data[c * 56 + 55] != 0.0f);

  const auto shorter = random_sequence(53, rng);
  const auto padded = zero_pad_sample(shorter, config, 56);
  for (std::size_t c = 0; c < 18; ++c) {
    for (std::size_t t = 53; t < 56; ++t) CHECK(padded.data[c * 56 + t] == 0.0f);
    CHECK(padded.data[c * 56 + 52] != 0.0f);
  }
  const auto truncated = zero_pad_sample(random_sequence(70, rng), config, 56);
  CHECK(truncated.length == 56);

  Dataset dataset = {random_sequence(40, rng), random_sequence(57, rng), random_sequence(90, rng)};
  const std::vector<std::size_t> first_two = {0, 1};
  CHECK(zero_pad_target(dataset, first_two) == 84);
  const std::vector<std::size_t> all = {0, 1, 2};
  CHECK(zero_pad_target(dataset, all) == 112);

  config.padding = PaddingMode::zero_pad;
  config.pad_length = 84;
  for (const auto& seq : dataset) CHECK(build_samples(seq, config, 0).size() == 1);
  config.pad_length = 0;
  CHECK_THROWS_AS(build_samples(dataset[0], config, 0), ConfigError);
}

TEST_CASE("transforms") {
  Rng rng(7);
  PreprocessConfig config;
  const auto seq = random_sequence(30, rng);
  const auto base = make_window(seq, 0, config);

  auto reversed = base;
  apply_transform(reversed, Transform::reversed, rng);
  CHECK(reversed.data != base.data);
  for (std::size_t c = 0; c < 18; ++c) CHECK(reversed.data[c * 28] == base.data[c * 28 + 27]);
  apply_transform(reversed, Transform::reversed, rng);
  CHECK(reversed.data == base.data);

  auto a = base, b = base;
  Rng r1(42), r2(42);
  apply_transform(a, Transform::shuffled, r1);
  apply_transform(b, Transform::shuffled, r2);
  CHECK(a.data == b.data);
  CHECK(a.data != base.data);
  // a frame permutation: every shuffled column equals some original column, each used once
  std::multiset<std::vector<float>> original_frames, shuffled_frames;
  for (std::size_t t = 0; t < 28; ++t) {
    std::vector<float> f1, f2;
    for (std::size_t c = 0; c < 18; ++c) {
      f1.push_back(base.data[c * 28 + t]);
      f2.push_back(a.data[c * 28 + t]);
    }
    original_frames.insert(f1);
    shuffled_frames.insert(f2);
  }
  CHECK(original_frames == shuffled_frames);

  auto same = base;
  apply_transform(same, Transform::forward, rng);
  CHECK(same.data == base.data);

  config.transform = Transform::shuffled;
  CHECK(sample_windows(seq, config, 9)[0].data == sample_windows(seq, config, 9)[0].data);
}

TEST_CASE("enum and preprocess config parsing") {
  CHECK(keypoint_set_from_string("lower6") == KeypointSet::lower6);
  CHECK(transform_from_string("shuffled") == Transform::shuffled);
  CHECK_THROWS_AS(keypoint_set_from_string("upper"), ConfigError);
  CHECK_THROWS_AS(padding_mode_from_string("pad"), ConfigError);
  PreprocessConfig c;
  c.keypoints = KeypointSet::full13;
  c.padding = PaddingMode::zero_pad;
  c.pad_length = 84;
  const auto back = nlohmann::json(c).get<PreprocessConfig>();
  CHECK(nlohmann::json(back) == nlohmann::json(c));
}

TEST_CASE("manifest round-trip with null joints") {
  Rng rng(8);
  Dataset dataset = {random_sequence(29, rng, "a"), random_sequence(31, rng, "b")};
  dataset[1].fencer_id = 4;
  dataset[1].action = Action::WW;
  dataset[1].front_side.reset();
  dataset[1].y(3, Joint::nose) = std::numeric_limits<double>::quiet_NaN();
  dataset[1].x(3, Joint::nose) = std::numeric_limits<double>::quiet_NaN();
  const auto path = temp_file("fencenet_manifest_roundtrip.jsonl");
  write_manifest(path, dataset);

  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("joints").size() == 13);
    CHECK(j.at("joints")[0] == "nose");
    if (j.at("video_id") == "b") CHECK(j.at("frames")[3][0] == nlohmann::json::array({nullptr, nullptr}));
  }
  CHECK(lines == 2);

  const auto back = read_manifest(path);
  REQUIRE(back.size() == 2);
  for (std::size_t v = 0; v < 2; ++v) {
    CHECK(back[v].video_id == dataset[v].video_id);
    CHECK(back[v].fencer_id == dataset[v].fencer_id);
    CHECK(back[v].action == dataset[v].action);
    CHECK(back[v].num_frames == dataset[v].num_frames);
    CHECK(back[v].front_side == dataset[v].front_side);
    for (std::size_t i = 0; i < dataset[v].coords.size(); ++i) {
      const double a = dataset[v].coords[i], b = back[v].coords[i];
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("manifest errors") {
  CHECK_THROWS_WITH_AS(read_manifest(temp_file("fencenet_no_such_manifest.jsonl")),
                       doctest::Contains("manifest not found"), DataError);

  Rng rng(9);
  auto good = pose_to_json(random_sequence(28, rng, "ok"));
  auto bad_action = good;
  bad_action["action"] = "LUNGE";
  auto bad_joints = good;
  bad_joints["joints"][1] = "neck";
  auto short_frame = good;
  short_frame["frames"][2].erase(0);
  auto bad_fencer = good;
  bad_fencer["fencer_id"] = 0;

  for (const auto& bad : {bad_action, bad_joints, short_frame, bad_fencer}) {
    const auto path = temp_file("fencenet_bad_manifest.jsonl");
    {
      std::ofstream out(path);
      out << good.dump() << "\n\n" << bad.dump() << "\n";
    }
    CHECK_THROWS_WITH_AS(read_manifest(path), doctest::Contains(":3"), DataError);
    std::filesystem::remove(path);
  }
  CHECK_THROWS_AS(action_from_string("XX"), DataError);
  CHECK(action_from_string("JS") == Action::JS);
}

TEST_CASE("person-independent splits partition the dataset") {
  SynthConfig sc;
  sc.num_fencers = 4;
  sc.reps_per_action = 2;
  const auto dataset = synth_generate(sc);
  const auto fencers = fencer_ids(dataset);
  CHECK(fencers == std::vector<int>{1, 2, 3, 4});
  std::vector<int> seen(dataset.size(), 0);
  for (int f : fencers) {
    const auto split = split_pi(dataset, f);
    std::set<int> train_fencers;
    for (auto i : split.train) train_fencers.insert(dataset[i].fencer_id);
    CHECK(train_fencers.size() == 3);
    CHECK(train_fencers.count(f) == 0);
    CHECK(split.train.size() + split.test.size() == dataset.size());
    for (auto i : split.test) {
      CHECK(dataset[i].fencer_id == f);
      ++seen[i];
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
  CHECK_THROWS_AS(split_pi(dataset, 9), ArgumentError);
}

TEST_CASE("random split per (fencer, action) group") {
  SynthConfig sc;
  sc.num_fencers = 3;
  sc.reps_per_action = 10;
  const auto dataset = synth_generate(sc);
  Rng r1(5), r2(5);
  const auto split = split_random(dataset, 0.2, r1);
  CHECK(split.test.size() == 3u * 6u * 2u);
  CHECK(split.test == split_random(dataset, 0.2, r2).test);
  std::set<std::string> train_ids, test_ids;
  for (auto i : split.train) train_ids.insert(dataset[i].video_id);
  for (auto i : split.test) test_ids.insert(dataset[i].video_id);
  for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);

  std::map<std::pair<int, int>, int> per_group;
  for (auto i : split.test) ++per_group[{dataset[i].fencer_id, dataset[i].label()}];
  CHECK(per_group.size() == 18);
  for (const auto& [key, n] : per_group) CHECK(n == 2);

  Rng r3(1);
  CHECK(split_random(dataset, 0.0, r3).test.empty());
  CHECK_THROWS_AS(split_random(dataset, 1.0, r3), ArgumentError);
}

TEST_CASE("synthetic generator") {
  SynthConfig sc;
  sc.seed = 3;
  const auto dataset = synth_generate(sc);
  CHECK(dataset.size() == 600);
  const auto again = synth_generate(sc);
  CHECK(again[123].coords == dataset[123].coords);

  for (const auto& seq : dataset) {
    CHECK(seq.num_frames >= 28);
    CHECK(seq.front_side == Side::right);
  }

  // mean frame-to-frame hip displacement: positive for SF, negative for SB
  for (auto action : {Action::SF, Action::SB}) {
    double total = 0.0;
    int n = 0;
    for (const auto& seq : dataset) {
      if (seq.action != action) continue;
      for (std::size_t t = 1; t < seq.num_frames; ++t) {
        total += 0.5 * (seq.x(t, Joint::l_hip) + seq.x(t, Joint::r_hip)) -
                 0.5 * (seq.x(t - 1, Joint::l_hip) + seq.x(t - 1, Joint::r_hip));
        ++n;
      }
    }
    CHECK((action == Action::SF ? total > 0.0 : total < 0.0));
    (void)n;
  }
}

TEST_CASE("synthetic IS windows have strictly increasing smoothed hip speed") {
  SynthConfig sc;
  sc.num_fencers = 3;
  sc.reps_per_action = 3;
  sc.noise = 0.0;
  const auto dataset = synth_generate(sc);
  PreprocessConfig config;
  config.keypoints = KeypointSet::lower6;
  int checked = 0;
  for (const auto& seq : dataset) {
    if (seq.action != Action::IS) continue;
    for (const auto& w : sample_windows(seq, config, 0)) {
      // lower6 channel 0 = l_hip x, channel 2 = r_hip x
      std::vector<double> speed;
      for (std::size_t t = 1; t < 28; ++t) {
        const double now = 0.5 * (w.data[t] + w.data[2 * 28 + t]);
        const double before = 0.5 * (w.data[t - 1] + w.data[2 * 28 + t - 1]);
        speed.push_back(now - before);
      }
      for (std::size_t t = 2; t + 1 < speed.size(); ++t) {
        const double prev = (speed[t - 2] + speed[t - 1] + speed[t]) / 3.0;
        const double next = (speed[t - 1] + speed[t] + speed[t + 1]) / 3.0;
        CHECK(next > prev);
      }
      ++checked;
    }
  }
  CHECK(checked > 0);
}
