#pragma once

#include <cstddef>
#include <vector>

#include "fencenet/pose.hpp"
#include "fencenet/random.hpp"

namespace fencenet {

// Video-level partition of a dataset, as sorted indices.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<int> fencer_ids(const Dataset& dataset);

// Every video of `held_out_fencer` goes to test. Throws ArgumentError for an
// unknown fencer.
Split split_pi(const Dataset& dataset, int held_out_fencer);

// Per (fencer, action) group, round(fraction * n) randomly chosen videos go to test.
Split split_random(const Dataset& dataset, double fraction, Rng& rng);

}  // namespace fencenet
