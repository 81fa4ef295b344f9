#include "sunny/sunny.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sunny/error.hpp"
#include "sunny/log.hpp"
#include "sunny/metrics.hpp"

namespace sunny {

Neighborhood knn(std::span<const double> query, const Matrix<double>& training, std::size_t k) {
  if (training.rows() == 0) throw Error("knn: empty training set");
  if (query.size() != training.cols()) throw Error("knn: query and training dimensionality differ");
  const std::size_t n = training.rows();
  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = training.row(r);
    double sum = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double diff = query[c] - row[c];
      sum += diff * diff;
    }
    d[r] = {sum, r};
  }
  const std::size_t take = std::min(k, n);
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take), d.end());
  Neighborhood out;
  out.rows.reserve(take);
  out.distances.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.rows.push_back(d[i].second);
    out.distances.push_back(std::sqrt(d[i].first));
  }
  return out;
}

std::vector<AlgorithmIndex> select_subset_exhaustive(const Scenario& scenario,
                                                     std::span<const InstanceIndex> neighborhood) {
  const double tau = scenario.timeout();
  std::vector<AlgorithmIndex> useful;
  std::vector<std::uint8_t> covered_by_all(neighborhood.size(), 0);
  for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
    bool any = false;
    for (std::size_t j = 0; j < neighborhood.size(); ++j) {
      if (scenario.solved(neighborhood[j], a)) {
        any = true;
        covered_by_all[j] = 1;
      }
    }
    if (any) useful.push_back(a);
  }
  const auto max_cover =
      static_cast<std::size_t>(std::count(covered_by_all.begin(), covered_by_all.end(), std::uint8_t{1}));
  if (max_cover == 0) return {};

  // Combinations of each size in lexicographic order; the first strictly
  // cheaper set wins, so residual ties go to the lexicographically smallest.
  const std::size_t r = useful.size();
  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= r; ++size) {
    pick.resize(size);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    std::vector<AlgorithmIndex> best;
    double best_time = std::numeric_limits<double>::infinity();
    while (true) {
      std::size_t cover = 0;
      double time = 0.0;
      for (auto i : neighborhood) {
        double t = tau;
        bool hit = false;
        for (auto p : pick) {
          const auto a = useful[p];
          if (scenario.solved(i, a)) {
            hit = true;
            t = std::min(t, scenario.runtime(i, a));
          }
        }
        cover += hit ? 1 : 0;
        time += t;
      }
      if (cover == max_cover && time < best_time) {
        best_time = time;
        best.clear();
        for (auto p : pick) best.push_back(useful[p]);
      }
      // Next combination.
      std::size_t pos = size;
      while (pos > 0 && pick[pos - 1] == r - size + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t q = pos; q < size; ++q) pick[q] = pick[q - 1] + 1;
    }
    if (!best.empty()) return best;
  }
  return useful;  // unreachable: the full useful set always reaches max_cover
}

std::vector<AlgorithmIndex> select_subset_greedy(const Scenario& scenario,
                                                 std::span<const InstanceIndex> neighborhood,
                                                 std::size_t max_size) {
  if (max_size == 0) throw Error("greedy schedule limit must be >= 1");
  std::vector<std::uint8_t> covered(neighborhood.size(), 0);
  std::size_t remaining = neighborhood.size();
  std::vector<AlgorithmIndex> picked;
  while (picked.size() < max_size && remaining > 0) {
    std::size_t best_cover = 0;
    double best_time = std::numeric_limits<double>::infinity();
    AlgorithmIndex best = 0;
    for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
      std::size_t cover = 0;
      double time = 0.0;
      for (std::size_t j = 0; j < neighborhood.size(); ++j) {
        if (covered[j]) continue;
        const auto i = neighborhood[j];
        cover += scenario.solved(i, a) ? 1 : 0;
        time += scenario.effective_runtime(i, a);
      }
      if (cover > best_cover || (cover == best_cover && cover > 0 && time < best_time)) {
        best_cover = cover;
        best_time = time;
        best = a;
      }
    }
    if (best_cover == 0) break;
    picked.push_back(best);
    for (std::size_t j = 0; j < neighborhood.size(); ++j) {
      if (!covered[j] && scenario.solved(neighborhood[j], best)) {
        covered[j] = 1;
        --remaining;
      }
    }
  }
  return picked;
}

Schedule allocate_and_order(std::span<const AlgorithmIndex> selected, const Scenario& scenario,
                            std::span<const InstanceIndex> neighborhood, double timeout, AlgorithmIndex backup) {
  if (!(timeout > 0.0)) throw Error("allocate_and_order: timeout must be positive");
  const std::size_t m = scenario.num_algorithms();
  if (backup >= m) throw Error("allocate_and_order: unknown backup algorithm");
  std::vector<std::size_t> slots(m, 0);
  std::size_t unsolved = 0;
  for (auto i : neighborhood) {
    bool hit = false;
    for (auto a : selected) {
      if (a >= m) throw Error("allocate_and_order: unknown algorithm");
      if (scenario.solved(i, a)) {
        ++slots[a];
        hit = true;
      }
    }
    unsolved += hit ? 0 : 1;
  }
  slots[backup] += unsolved;
  const std::size_t total = std::accumulate(slots.begin(), slots.end(), std::size_t{0});
  if (total == 0) return Schedule{{{backup, timeout}}};
  if (unsolved == neighborhood.size()) {
    log_debug("selected solvers cover no neighbor; whole timeout goes to the backup solver");
  }

  std::vector<std::pair<double, AlgorithmIndex>> order;
  for (std::size_t a = 0; a < m; ++a) {
    if (slots[a] == 0) continue;
    double sum = 0.0;
    for (auto i : neighborhood) sum += scenario.solved(i, a) ? scenario.runtime(i, a) : timeout;
    order.emplace_back(sum / static_cast<double>(neighborhood.size()), a);
  }
  std::sort(order.begin(), order.end());
  Schedule schedule;
  for (const auto& [mean, a] : order) {
    schedule.slots.push_back({a, timeout * static_cast<double>(slots[a]) / static_cast<double>(total)});
  }
  return schedule;
}

AlgorithmIndex backup_solver(const Scenario& scenario, std::span<const InstanceIndex> training, double lambda) {
  if (training.empty()) throw Error("backup_solver: empty training set");
  return sbs(scenario, training, lambda).algorithm;
}

std::string_view to_string(Engine engine) {
  return engine == Engine::exhaustive ? "exhaustive" : "greedy";
}

Engine parse_engine(std::string_view text) {
  if (text == "exhaustive" || text == "sunny") return Engine::exhaustive;
  if (text == "greedy" || text == "greedy-sunny") return Engine::greedy;
  throw ConfigError("unknown engine '" + std::string(text) + "' (expected exhaustive or greedy)");
}

Schedule schedule_for_neighborhood(const Scenario& scenario, std::span<const InstanceIndex> neighborhood,
                                   const SunnyParams& params, double timeout) {
  const auto selected = params.engine == Engine::exhaustive
                            ? select_subset_exhaustive(scenario, neighborhood)
                            : select_subset_greedy(scenario, neighborhood, params.schedule_limit);
  return allocate_and_order(selected, scenario, neighborhood, timeout, params.backup);
}

Selector::Selector(const Scenario& scenario, std::vector<InstanceIndex> training, SunnyParams params)
    : scenario_(&scenario), training_(std::move(training)), params_(std::move(params)) {
  if (training_.empty()) throw Error("selector needs a non-empty training set");
  if (params_.k < 1) throw Error("neighborhood size must be >= 1");
  if (params_.features.empty()) throw Error("selector needs at least one feature");
  for (auto f : params_.features) {
    if (f >= scenario.num_features()) throw Error("feature index out of range");
  }
  if (params_.backup >= scenario.num_algorithms()) throw Error("unknown backup algorithm");
  transform_ = preprocess_features(scenario, training_).transform;
  scaled_ = Matrix<double>(training_.size(), params_.features.size());
  for (std::size_t r = 0; r < training_.size(); ++r) {
    const auto raw = scenario.features(training_[r]);
    for (std::size_t c = 0; c < params_.features.size(); ++c) {
      scaled_(r, c) = transform_.scale(params_.features[c], raw[params_.features[c]]);
    }
  }
}

std::vector<InstanceIndex> Selector::neighbors(std::span<const double> raw_features) const {
  const auto query = transform_.apply(raw_features, params_.features);
  const auto nb = knn(query, scaled_, params_.k);
  std::vector<InstanceIndex> out;
  out.reserve(nb.rows.size());
  for (auto r : nb.rows) out.push_back(training_[r]);
  return out;
}

Schedule Selector::schedule(std::span<const double> raw_features) const {
  const auto nb = neighbors(raw_features);
  return schedule_for_neighborhood(*scenario_, nb, params_, scenario_->timeout());
}

Schedule Selector::schedule(InstanceIndex instance) const { return schedule(scenario_->features(instance)); }

Schedule make_schedule(std::span<const double> query_features, const Selector& selector) {
  return selector.schedule(query_features);
}

std::size_t default_k(std::size_t training_size) {
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(training_size))));
  return std::max<std::size_t>(1, k);
}

}  // namespace sunny
