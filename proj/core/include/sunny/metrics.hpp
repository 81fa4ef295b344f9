#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sunny/scenario.hpp"
#include "sunny/schedule.hpp"

namespace sunny {

inline constexpr double kDefaultParPenalty = 10.0;

enum class FailureKind {
  wrong_solvers,      // no scheduled algorithm can solve the instance at all
  insufficient_time,  // a scheduled algorithm solves it, but its slot was too short
};

const char* to_string(FailureKind kind);

struct SimulationOutcome {
  InstanceIndex instance = 0;
  bool solved = false;
  // Solve time including charged feature cost; the timeout when unsolved.
  double effective_time = 0.0;
  std::optional<AlgorithmIndex> solving_algorithm;
  std::optional<FailureKind> failure;

  friend bool operator==(const SimulationOutcome&, const SimulationOutcome&) = default;
};

// PAR-lambda contribution of one run: the runtime when solved strictly within
// the timeout, lambda * timeout otherwise.
double par_value(double runtime, bool solved, double timeout, double lambda);

double par_value(const SimulationOutcome& outcome, double timeout, double lambda);

// Replays the schedule against recorded runtimes. With `charge_feature_cost`
// the scenario's per-instance feature cost is paid before the first slot.
SimulationOutcome simulate_schedule(const Schedule& schedule, const Scenario& scenario,
                                    InstanceIndex instance, bool charge_feature_cost);

double vbs_par(const Scenario& scenario, std::span<const InstanceIndex> instances, double lambda);

struct SingleBest {
  AlgorithmIndex algorithm = 0;
  double par = 0.0;
};

// Algorithm with the lowest mean PAR over `instances`; ties go to the smaller id.
SingleBest sbs(const Scenario& scenario, std::span<const InstanceIndex> instances, double lambda);

// (m_sbs - m_s) / (m_sbs - m_vbs). Throws UndefinedBaselineError if m_sbs <= m_vbs.
double closed_gap(double m_sbs, double m_s, double m_vbs);

// Pairwise comparison with tolerance delta. Timeout clauses take precedence
// over the tolerance clause, so a timed-out run never earns 0.5.
double cmp_delta(double t, double t_other, double timeout, double delta);

// times[s][i]: time of selector s on instance i (timeout when unsolved).
// Returns per-selector Borda counts normalised by the number of instances.
std::vector<double> borda_table(const std::vector<std::vector<double>>& times, double timeout,
                                double delta);

struct AggregateScores {
  double par = 0.0;
  double solved_fraction = 0.0;
  double m_vbs = 0.0;
  double m_sbs = 0.0;
  AlgorithmIndex sbs_algorithm = 0;
  std::optional<double> closed_gap;  // absent when m_sbs <= m_vbs
  double speedup_ratio = 0.0;        // m_vbs / m_s
};

// Aggregates outcomes of one selector; SBS and VBS are computed on the
// instances the outcomes cover.
AggregateScores aggregate_scores(const Scenario& scenario,
                                 std::span<const SimulationOutcome> outcomes, double lambda);

}  // namespace sunny
