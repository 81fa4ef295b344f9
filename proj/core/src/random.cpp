#include "sunny/random.hpp"

#include <cmath>
#include <numbers>

namespace sunny {

double SplitMix64::normal() noexcept {
  // Box-Muller; one draw per call keeps the stream position easy to reason about.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t repetition, std::uint64_t fold) noexcept {
  SplitMix64 a(seed);
  SplitMix64 b(a.next() ^ (repetition * 0xd1b54a32d192ed03ULL));
  SplitMix64 c(b.next() ^ (fold * 0x8cb92ba72f3d8dd7ULL));
  return c.next();
}

}  // namespace sunny
