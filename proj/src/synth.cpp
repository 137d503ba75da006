#include "fencenet/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fencenet/errors.hpp"
#include "fencenet/random.hpp"

namespace fencenet {

namespace {

struct FrameStats {
  double mean, stddev;
  int min, max;
};

// Per-class frame-count distributions, shaped like the real footwork recordings.
constexpr std::array<FrameStats, kNumClasses> kFrameStats = {{
    {53.5, 5.7, 40, 68},  // R
    {65.1, 8.8, 49, 98},  // IS
    {70.4, 8.7, 52, 92},  // WW
    {69.9, 9.0, 51, 98},  // JS
    {44.2, 9.8, 29, 80},  // SF
    {41.1, 8.1, 28, 62},  // SB
}};

struct Point {
  double x, y;
};

// En-garde pose facing +x, hip centre at the origin, y pointing down, nose to
// ankle height of one unit.
constexpr std::array<Point, kNumJoints> kBasePose = {{
    {0.05, -0.62},   // nose
    {-0.06, -0.45},  // l_shoulder
    {0.06, -0.45},   // r_shoulder
    {-0.20, -0.50},  // l_elbow
    {0.22, -0.33},   // r_elbow
    {-0.24, -0.66},  // l_wrist
    {0.38, -0.36},   // r_wrist
    {-0.04, 0.0},    // l_hip
    {0.04, 0.0},     // r_hip
    {0.0, 0.0},      // l_knee (derived)
    {0.0, 0.0},      // r_knee (derived)
    {-0.30, 0.38},   // l_ankle
    {0.25, 0.38},    // r_ankle
}};

struct FencerStyle {
  double pixels_per_unit;
  double origin_x, origin_y;
  double stance;
  double reach;
  double tempo;
  std::array<Point, kNumJoints> posture;
};

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

// Fraction of the lunge distance covered by the hips at normalized time tau.
double lunge_profile(Action action, double tau) {
  switch (action) {
    case Action::IS: return tau * tau;
    case Action::WW:
      if (tau < 0.3) return 0.4 * smoothstep(tau / 0.3);
      if (tau < 0.6) return 0.4;
      return 0.4 + 0.6 * smoothstep((tau - 0.6) / 0.4);
    default: return tau;
  }
}

// Displacements of the moving parts at normalized time tau, in body units.
struct Motion {
  double hip_x = 0, hip_y = 0;
  double front_ankle_x = 0, front_ankle_lift = 0;
  double back_ankle_x = 0, back_ankle_lift = 0;
  double hop = 0;
  double arm = 0;
};

Motion motion_at(Action action, double tau, double lunge, double step) {
  Motion m;
  if (action == Action::SF || action == Action::SB) {
    const double first = smoothstep(2.0 * tau);
    const double second = smoothstep(2.0 * tau - 1.0);
    const double sign = action == Action::SF ? 1.0 : -1.0;
    // Forward steps lead with the front foot, backward steps with the back foot.
    const double front = action == Action::SF ? first : second;
    const double back = action == Action::SF ? second : first;
    m.front_ankle_x = sign * step * front;
    m.back_ankle_x = sign * step * back;
    m.front_ankle_lift = 0.05 * std::sin(std::numbers::pi * front);
    m.back_ankle_lift = 0.04 * std::sin(std::numbers::pi * back);
    m.hip_x = sign * step * 0.5 * (first + second);
    return m;
  }
  const double p = lunge_profile(action, tau);
  m.hip_x = lunge * p;
  m.hip_y = 0.10 * p;
  m.front_ankle_x = 1.7 * lunge * p;
  m.front_ankle_lift = 0.06 * std::sin(std::numbers::pi * p);
  m.arm = std::clamp(1.5 * p, 0.0, 1.0);
  if (action == Action::JS) {
    m.back_ankle_x = 0.6 * lunge * p;
    m.hop = 0.05 * std::sin(std::numbers::pi * tau);
  }
  return m;
}

PoseSequence generate_video(const FencerStyle& style, int fencer, Action action, int rep, std::uint64_t seed,
                            double noise) {
  char id[64];
  std::snprintf(id, sizeof(id), "synth_f%02d_%s_%02d", fencer, std::string(action_name(action)).c_str(), rep);
  auto rng = derive_rng(seed, id);
  std::uniform_real_distribution<double> unit(0.9, 1.1);
  std::normal_distribution<double> jitter(0.0, 1.0);

  const auto& stats = kFrameStats[static_cast<std::size_t>(action)];
  const double raw_frames = stats.mean * style.tempo + stats.stddev * jitter(rng);
  const int frames = std::clamp(static_cast<int>(std::lround(raw_frames)), stats.min, stats.max);
  const double lunge = 0.55 * style.reach * unit(rng);
  const double step = 0.30 * style.reach * unit(rng);
  const double start_x = std::uniform_real_distribution<double>(-0.1, 0.1)(rng);

  PoseSequence seq;
  seq.video_id = id;
  seq.fencer_id = fencer;
  seq.action = action;
  seq.fps = 30.0;
  seq.num_frames = static_cast<std::size_t>(frames);
  seq.front_side = Side::right;
  seq.coords.resize(seq.num_frames * kNumJoints * 2);

  std::normal_distribution<double> coord_noise(0.0, noise > 0.0 ? noise : 1.0);
  for (int t = 0; t < frames; ++t) {
    const double tau = frames > 1 ? static_cast<double>(t) / (frames - 1) : 0.0;
    const Motion m = motion_at(action, tau, lunge, step);
    std::array<Point, kNumJoints> pose{};
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      pose[j] = {kBasePose[j].x + style.posture[j].x, kBasePose[j].y + style.posture[j].y};
    }
    auto joint = [&](Joint j) -> Point& { return pose[static_cast<std::size_t>(j)]; };

    joint(Joint::r_ankle).x = joint(Joint::r_ankle).x * style.stance + m.front_ankle_x;
    joint(Joint::r_ankle).y -= m.front_ankle_lift;
    joint(Joint::l_ankle).x = joint(Joint::l_ankle).x * style.stance + m.back_ankle_x;
    joint(Joint::l_ankle).y -= m.back_ankle_lift;

    for (auto j : {Joint::nose, Joint::l_shoulder, Joint::r_shoulder, Joint::l_elbow, Joint::r_elbow,
                   Joint::l_wrist, Joint::r_wrist, Joint::l_hip, Joint::r_hip}) {
      joint(j).x += m.hip_x;
      joint(j).y += m.hip_y - m.hop;
    }
    joint(Joint::r_elbow).x += 0.12 * m.arm;
    joint(Joint::r_wrist).x += 0.22 * m.arm;
    joint(Joint::r_wrist).y += 0.08 * m.arm;

    const Point r_hip = joint(Joint::r_hip), l_hip = joint(Joint::l_hip);
    joint(Joint::r_knee) = {0.5 * (r_hip.x + joint(Joint::r_ankle).x) + 0.06 + style.posture[10].x,
                            0.5 * (r_hip.y + joint(Joint::r_ankle).y) + style.posture[10].y};
    joint(Joint::l_knee) = {0.5 * (l_hip.x + joint(Joint::l_ankle).x) + 0.03 + style.posture[9].x,
                            0.5 * (l_hip.y + joint(Joint::l_ankle).y) + style.posture[9].y};

    for (std::size_t j = 0; j < kNumJoints; ++j) {
      double x = pose[j].x + start_x;
      double y = pose[j].y;
      if (noise > 0.0) {
        x += coord_noise(rng);
        y += coord_noise(rng);
      }
      seq.coords[(static_cast<std::size_t>(t) * kNumJoints + j) * 2] = style.origin_x + style.pixels_per_unit * x;
      seq.coords[(static_cast<std::size_t>(t) * kNumJoints + j) * 2 + 1] = style.origin_y + style.pixels_per_unit * y;
    }
  }
  return seq;
}

}  // namespace

Dataset synth_generate(const SynthConfig& config) {
  if (config.num_fencers < 1 || config.reps_per_action < 1) {
    throw ArgumentError("synthetic dataset needs at least one fencer and one repetition");
  }
  if (config.noise < 0.0) throw ArgumentError("noise must be non-negative");
  Dataset dataset;
  for (int fencer = 1; fencer <= config.num_fencers; ++fencer) {
    auto rng = derive_rng(config.seed, "fencer", static_cast<std::uint64_t>(fencer));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> posture(0.0, 0.015);
    FencerStyle style{};
    style.pixels_per_unit = 170.0 + 70.0 * u(rng);
    style.origin_x = 150.0 + 200.0 * u(rng);
    style.origin_y = 200.0 + 100.0 * u(rng);
    style.stance = 0.9 + 0.2 * u(rng);
    style.reach = 0.85 + 0.3 * u(rng);
    style.tempo = 0.9 + 0.2 * u(rng);
    for (auto& p : style.posture) p = {posture(rng), posture(rng)};
    for (auto action : kAllActions) {
      for (int rep = 1; rep <= config.reps_per_action; ++rep) {
        dataset.push_back(generate_video(style, fencer, action, rep, config.seed, config.noise));
      }
    }
  }
  return dataset;
}

}  // namespace fencenet
