#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace sunny {

// SplitMix64. The standard distributions are implementation-defined, so every
// random draw the library makes goes through this generator to keep fold plans
// and synthetic scenarios identical across toolchains.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept;

 private:
  std::uint64_t state_;
};

// Fisher-Yates, drawing from the back.
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Child seed for (repetition, fold). Fixed mixing; changing it changes every
// fold plan ever produced, so treat it as a stable format.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t repetition, std::uint64_t fold) noexcept;

}  // namespace sunny
