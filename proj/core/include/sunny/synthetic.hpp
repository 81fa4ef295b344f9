#pragma once

#include <cstddef>
#include <cstdint>

#include "sunny/scenario.hpp"

namespace sunny {

// Planted-cluster scenario generator used as a test and benchmark fixture.
//
// Instance i belongs to cluster i mod n_algorithms, and cluster c is dominated
// by algorithm c: it solves with probability `dominance` in a short time, while
// every other algorithm times out with probability `other_timeout` and is slow
// otherwise. Each informative feature places the clusters at well separated
// positions. Noise features carry no information about the performance
// clusters: with `noise_groups` = 0 they are uniform on [0, 10]; otherwise each
// instance also gets a decoy group, drawn independently of its cluster, and
// the noise features are tight around per-group centres.
struct SyntheticConfig {
  std::size_t n_instances = 200;
  std::size_t n_algorithms = 4;
  std::size_t n_informative = 5;
  std::size_t n_noise = 20;
  double timeout = 1200.0;
  double dominance = 0.95;
  double other_timeout = 0.8;
  // Fraction of instances made unsolvable by every algorithm.
  double unsolvable_fraction = 0.0;
  double cluster_spread = 0.6;
  std::size_t noise_groups = 8;
  bool feature_costs = false;
  std::uint64_t seed = 100;
};

// Feature names are "informative_<j>" and "noise_<j>", in that order.
Scenario generate_synthetic_scenario(const SyntheticConfig& config);

}  // namespace sunny
