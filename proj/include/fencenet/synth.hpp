#pragma once

#include <cstdint>

#include "fencenet/pose.hpp"

namespace fencenet {

// Synthetic footwork generator for desk-scale runs without the real dataset.
//
// Each fencer gets their own body scale and image offset, plus stance and speed jitter. Classes:
//   R   lunge at constant hip speed
//   IS  lunge with hip position growing as tau^2 (speed strictly increasing)
//   WW  lunge that stops midway, holds, then finishes
//   JS  constant-speed lunge where the back ankle slides forward and the body hops
//   SF  step forward: front foot then back foot
//   SB  step backward: back foot then front foot
// Every fencer faces +x with the right side in front.
struct SynthConfig {
  int num_fencers = 10;
  int reps_per_action = 10;
  std::uint64_t seed = 0;
  double noise = 0.004;  // per-coordinate Gaussian noise, in body heights
};

Dataset synth_generate(const SynthConfig& config);

}  // namespace fencenet
