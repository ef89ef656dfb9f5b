#include "brachiation/rng.hpp"

namespace brachiation {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RunRng::RunRng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  const std::uint64_t base = splitmix64(s);
  std::uint64_t stream = base ^ (index * 0xD1B54A32D192ED03ULL);
  engine_.seed(splitmix64(stream));
}

double RunRng::canonical() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RunRng::uniform(double lo, double hi) {
  if (!(hi > lo)) return lo;
  return lo + (hi - lo) * canonical();
}

}  // namespace brachiation
