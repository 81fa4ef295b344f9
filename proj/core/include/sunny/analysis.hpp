#pragma once

#include <cstddef>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "sunny/metrics.hpp"
#include "sunny/scenario.hpp"
#include "sunny/schedule.hpp"
#include "sunny/sunny.hpp"

namespace sunny {

// |a ∩ b| / |a ∪ b|; 1 for two empty sets.
double jaccard_index(const std::set<InstanceIndex>& a, const std::set<InstanceIndex>& b);

struct JaccardReport {
  std::vector<InstanceIndex> instances;
  std::vector<double> per_instance;
  double mean = 0.0;
};

// For each instance, compares its k-neighborhood among the selector's training
// instances in scaled selected-feature space with the one in raw performance
// space (timeout-capped runtimes). The instance itself is never its own
// neighbor.
JaccardReport jaccard_neighborhoods(const Selector& selector, std::span<const InstanceIndex> instances,
                                    std::size_t k);

struct JaccardSummary {
  std::vector<double> per_repetition;
  double grand_mean = 0.0;
};

// Groups reports by repetition (reports[r] holds all folds of repetition r).
JaccardSummary summarize_jaccard(const std::vector<std::vector<JaccardReport>>& reports);

struct UnsolvedBreakdown {
  std::size_t total = 0;
  std::size_t solved = 0;
  std::size_t wrong_solvers = 0;
  std::size_t insufficient_time = 0;
  // Fractions of the unsolved instances; 0 when everything was solved.
  double wrong_solvers_fraction = 0.0;
  double insufficient_time_fraction = 0.0;
};

UnsolvedBreakdown classify_unsolved(std::span<const SimulationOutcome> outcomes);

struct ScheduleSizeStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

// Throws Error on an empty input.
ScheduleSizeStats schedule_size_stats(std::span<const Schedule> schedules);

// CSV with independently sorted SBS, VBS and selector runtime columns.
// Unsolved entries are written as the timeout with solved = 0.
void runtime_distribution_export(std::ostream& out, const Scenario& scenario,
                                 std::span<const SimulationOutcome> selector_outcomes, double lambda);

struct ScenarioIndicators {
  std::size_t sbs_unsolved = 0;
  double vbs_speedup = 0.0;  // m_sbs / m_vbs
};

ScenarioIndicators scenario_indicators(const Scenario& scenario, std::span<const InstanceIndex> instances,
                                       double lambda);

}  // namespace sunny
