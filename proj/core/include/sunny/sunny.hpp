#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sunny/matrix.hpp"
#include "sunny/preprocess.hpp"
#include "sunny/scenario.hpp"
#include "sunny/schedule.hpp"

namespace sunny {

struct Neighborhood {
  // Row positions into the training matrix passed to knn, nearest first.
  std::vector<std::size_t> rows;
  std::vector<double> distances;
};

// The k nearest rows of `training` to `query` by Euclidean distance. Equal
// distances keep training-row order. Returns min(k, rows) neighbors.
Neighborhood knn(std::span<const double> query, const Matrix<double>& training, std::size_t k);

// Smallest algorithm set solving the most neighborhood instances; ties go to
// the lowest summed best-in-set runtime (timeout when unsolved), then to the
// lexicographically smallest sorted index list. Empty when nothing is solvable.
std::vector<AlgorithmIndex> select_subset_exhaustive(const Scenario& scenario,
                                                     std::span<const InstanceIndex> neighborhood);

// Greedy maximum coverage: repeatedly picks the algorithm solving the most
// still-uncovered instances (ties: lower runtime on the uncovered instances,
// then smaller id) until `max_size` picks or nothing new can be covered.
std::vector<AlgorithmIndex> select_subset_greedy(const Scenario& scenario,
                                                 std::span<const InstanceIndex> neighborhood,
                                                 std::size_t max_size);

// Each selected algorithm gets one slot per neighborhood instance it solves;
// the backup gets one slot per instance no selected algorithm solves. Slots
// share the timeout equally and run in ascending mean neighborhood runtime.
Schedule allocate_and_order(std::span<const AlgorithmIndex> selected, const Scenario& scenario,
                            std::span<const InstanceIndex> neighborhood, double timeout,
                            AlgorithmIndex backup);

// Algorithm minimising summed PAR-lambda over the training instances.
AlgorithmIndex backup_solver(const Scenario& scenario, std::span<const InstanceIndex> training,
                             double lambda);

enum class Engine { exhaustive, greedy };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view text);

struct SunnyParams {
  std::size_t k = 1;
  std::vector<std::size_t> features;  // original feature indices, distance order
  AlgorithmIndex backup = 0;
  std::size_t schedule_limit = 3;     // greedy engine cap
  Engine engine = Engine::greedy;
};

// Subset selection per engine followed by allocate_and_order.
Schedule schedule_for_neighborhood(const Scenario& scenario,
                                   std::span<const InstanceIndex> neighborhood,
                                   const SunnyParams& params, double timeout);

// A fitted SUNNY selector: feature transform and scaled training matrix built
// from `training`. Holds a pointer to the scenario, which must outlive it.
class Selector {
 public:
  Selector(const Scenario& scenario, std::vector<InstanceIndex> training, SunnyParams params);

  [[nodiscard]] const Scenario& scenario() const noexcept { return *scenario_; }
  [[nodiscard]] const SunnyParams& params() const noexcept { return params_; }
  [[nodiscard]] const std::vector<InstanceIndex>& training() const noexcept { return training_; }
  [[nodiscard]] const FeatureTransform& transform() const noexcept { return transform_; }
  // training x |params.features|
  [[nodiscard]] const Matrix<double>& training_features() const noexcept { return scaled_; }

  // Neighbors as scenario instance indices.
  [[nodiscard]] std::vector<InstanceIndex> neighbors(std::span<const double> raw_features) const;
  [[nodiscard]] Schedule schedule(std::span<const double> raw_features) const;
  [[nodiscard]] Schedule schedule(InstanceIndex instance) const;

 private:
  const Scenario* scenario_;
  std::vector<InstanceIndex> training_;
  SunnyParams params_;
  FeatureTransform transform_;
  Matrix<double> scaled_;
};

Schedule make_schedule(std::span<const double> query_features, const Selector& selector);

// Default neighborhood size: sqrt(n) rounded to the nearest integer, at least 1.
std::size_t default_k(std::size_t training_size);

}  // namespace sunny
