#include "fencenet/random.hpp"

#include <vector>

namespace fencenet {

Rng derive_rng(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                      static_cast<std::uint32_t>(tag.size())};
  for (unsigned char c : tag) words.push_back(c);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace fencenet
