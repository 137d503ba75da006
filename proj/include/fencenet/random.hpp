#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fencenet {

using Rng = std::mt19937_64;

// Independent stream for (seed, tag, index). Streams depend only on their inputs,
// so per-video or per-fold work gives the same numbers in any execution order.
Rng derive_rng(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

}  // namespace fencenet
