#pragma once

#include <cstdint>
#include <random>

namespace brachiation {

/// One SplitMix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent stream for run `index` of a batch seeded with `seed`. Run k
/// draws the same numbers whatever the batch size or thread schedule.
class RunRng {
 public:
  RunRng(std::uint64_t seed, std::uint64_t index);

  /// Uniform on [0, 1) from the top 53 bits of one engine output.
  double canonical();
  /// Uniform on [lo, hi); returns lo when the range is empty.
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace brachiation
