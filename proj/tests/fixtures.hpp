#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sunny/random.hpp"
#include "sunny/scenario.hpp"

namespace sunny::testing {

inline constexpr double kTableTimeout = 1800.0;

// Runtimes of the four-solver, five-instance toy portfolio; negative = timeout.
//           x1   x2    x3    x4    x5
// A1        -    -     3     -     278
// A2        -    593   -     -     -
// A3        -    -     36    1452  -
// A4        -    -     -     122   60
inline const double kTable[4][5] = {{-1, -1, 3, -1, 278},
                                    {-1, 593, -1, -1, -1},
                                    {-1, -1, 36, 1452, -1},
                                    {-1, -1, -1, 122, 60}};

// x1..x5 plus an optional query instance "x" (index 5) that no solver solves.
// One feature: x_j -> j, query -> 3.
inline Scenario toy_scenario(bool with_query = false, bool with_cost = false) {
  ScenarioData d;
  d.name = "toy";
  d.timeout = kTableTimeout;
  const std::size_t n = with_query ? 6 : 5;
  for (std::size_t i = 0; i < 5; ++i) d.instance_ids.push_back("x" + std::to_string(i + 1));
  if (with_query) d.instance_ids.push_back("x");
  d.algorithm_ids = {"A1", "A2", "A3", "A4"};
  d.feature_names = {"f0", "f1"};
  d.runtime = Matrix<double>(n, 4, kTableTimeout);
  d.solved = Matrix<std::uint8_t>(n, 4, 0);
  d.features = Matrix<double>(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    d.features(i, 0) = i < 5 ? static_cast<double>(i + 1) : 3.0;
    d.features(i, 1) = i < 5 ? static_cast<double>((i * 7) % 5) : 1.0;
    for (std::size_t a = 0; a < 4 && i < 5; ++a) {
      if (kTable[a][i] >= 0) {
        d.runtime(i, a) = kTable[a][i];
        d.solved(i, a) = 1;
      }
    }
  }
  if (with_cost) d.feature_cost = std::vector<double>(n, 10.0);
  return Scenario::create(std::move(d));
}

inline std::vector<InstanceIndex> first_five() { return {0, 1, 2, 3, 4}; }

// n instances x m algorithms, runtimes uniform in [1, timeout) with roughly
// `timeout_rate` of the cells unsolved; a single random feature.
inline Scenario random_scenario(SplitMix64& rng, std::size_t n, std::size_t m, double timeout_rate = 0.3,
                                double timeout = 100.0) {
  ScenarioData d;
  d.name = "random";
  d.timeout = timeout;
  for (std::size_t i = 0; i < n; ++i) d.instance_ids.push_back("i" + std::to_string(i));
  for (std::size_t a = 0; a < m; ++a) d.algorithm_ids.push_back("a" + std::to_string(a));
  d.feature_names = {"f"};
  d.runtime = Matrix<double>(n, m, timeout);
  d.solved = Matrix<std::uint8_t>(n, m, 0);
  d.features = Matrix<double>(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.features(i, 0) = rng.uniform();
    for (std::size_t a = 0; a < m; ++a) {
      if (rng.uniform() >= timeout_rate) {
        // Coarse grid so runtime ties happen often.
        d.runtime(i, a) = 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(timeout) - 1) / 10 * 10);
        d.solved(i, a) = 1;
      }
    }
  }
  return Scenario::create(std::move(d));
}

}  // namespace sunny::testing
