#include "sunny/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "sunny/error.hpp"
#include "sunny/random.hpp"

namespace sunny {
namespace {

std::string padded(const char* prefix, std::size_t i, std::size_t n) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

Scenario generate_synthetic_scenario(const SyntheticConfig& config) {
  if (config.n_instances < 1 || config.n_algorithms < 2 || config.n_informative + config.n_noise < 1) {
    throw Error("synthetic scenario needs >= 1 instance, >= 2 algorithms and >= 1 feature");
  }
  const std::size_t n = config.n_instances;
  const std::size_t m = config.n_algorithms;
  const std::size_t nf = config.n_informative + config.n_noise;
  const double tau = config.timeout;
  SplitMix64 rng(config.seed);

  ScenarioData d;
  d.name = "synthetic-" + std::to_string(config.seed);
  d.timeout = tau;
  for (std::size_t i = 0; i < n; ++i) d.instance_ids.push_back(padded("inst_", i, n));
  for (std::size_t a = 0; a < m; ++a) d.algorithm_ids.push_back(padded("algo_", a, m));
  for (std::size_t j = 0; j < config.n_informative; ++j) {
    d.feature_names.push_back(padded("informative_", j, config.n_informative));
  }
  for (std::size_t j = 0; j < config.n_noise; ++j) d.feature_names.push_back(padded("noise_", j, config.n_noise));

  // Cluster positions per informative feature: a seeded permutation of 0..m-1
  // spread over [0, 10].
  std::vector<std::vector<double>> centre(config.n_informative, std::vector<double>(m));
  for (auto& c : centre) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle(std::span(perm), rng);
    for (std::size_t k = 0; k < m; ++k) c[k] = 10.0 * static_cast<double>(perm[k]) / static_cast<double>(m - 1);
  }

  SplitMix64 decoy_rng(derive_seed(config.seed, 0, 1));
  std::vector<std::vector<double>> decoy_centre(config.n_noise, std::vector<double>(config.noise_groups));
  for (auto& c : decoy_centre) {
    for (auto& x : c) x = decoy_rng.uniform(0.0, 10.0);
  }

  const auto n_unsolvable = static_cast<std::size_t>(config.unsolvable_fraction * static_cast<double>(n) + 0.5);
  std::vector<std::uint8_t> unsolvable(n, 0);
  {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    shuffle(std::span(ids), rng);
    for (std::size_t i = 0; i < std::min(n_unsolvable, n); ++i) unsolvable[ids[i]] = 1;
  }

  d.runtime = Matrix<double>(n, m);
  d.solved = Matrix<std::uint8_t>(n, m);
  d.features = Matrix<double>(n, nf);
  if (config.feature_costs) d.feature_cost.emplace(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cluster = i % m;
    for (std::size_t j = 0; j < config.n_informative; ++j) {
      d.features(i, j) = centre[j][cluster] + config.cluster_spread * rng.normal();
    }
    if (config.noise_groups == 0) {
      for (std::size_t j = 0; j < config.n_noise; ++j) d.features(i, config.n_informative + j) = rng.uniform(0.0, 10.0);
    } else {
      const auto group = static_cast<std::size_t>(decoy_rng.below(config.noise_groups));
      for (std::size_t j = 0; j < config.n_noise; ++j) {
        d.features(i, config.n_informative + j) = decoy_centre[j][group] + config.cluster_spread * decoy_rng.normal();
      }
    }

    for (std::size_t a = 0; a < m; ++a) {
      const double draw = rng.uniform();
      bool ok = false;
      double t = tau;
      if (a == cluster) {
        ok = draw < config.dominance;
        if (ok) t = rng.uniform(0.001 * tau, 0.05 * tau);
      } else {
        ok = draw >= config.other_timeout;
        if (ok) t = rng.uniform(0.2 * tau, 0.9 * tau);
      }
      if (unsolvable[i]) {
        ok = false;
        t = tau;
      }
      d.solved(i, a) = ok ? 1 : 0;
      d.runtime(i, a) = ok ? t : tau;
    }
    if (config.feature_costs) (*d.feature_cost)[i] = rng.uniform(0.0, 0.01 * tau);
  }
  return Scenario::create(std::move(d));
}

}  // namespace sunny
