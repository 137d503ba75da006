#include "fencenet/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fencenet/errors.hpp"

namespace fencenet {

std::vector<int> fencer_ids(const Dataset& dataset) {
  std::set<int> ids;
  for (const auto& seq : dataset) ids.insert(seq.fencer_id);
  return {ids.begin(), ids.end()};
}

Split split_pi(const Dataset& dataset, int held_out_fencer) {
  Split split;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset[i].fencer_id == held_out_fencer ? split.test : split.train).push_back(i);
  }
  if (split.test.empty()) throw ArgumentError("no videos for fencer " + std::to_string(held_out_fencer));
  return split;
}

Split split_random(const Dataset& dataset, double fraction, Rng& rng) {
  if (fraction < 0.0 || fraction >= 1.0) throw ArgumentError("test fraction must be in [0, 1)");
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    groups[{dataset[i].fencer_id, dataset[i].label()}].push_back(i);
  }
  Split split;
  for (auto& [key, members] : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(members.size())));
    split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace fencenet
