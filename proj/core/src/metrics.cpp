#include "sunny/metrics.hpp"

#include <cmath>
#include <limits>

#include "sunny/error.hpp"

namespace sunny {

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::wrong_solvers: return "WrongSolvers";
    case FailureKind::insufficient_time: return "InsufficientTime";
  }
  return "?";
}

double par_value(double runtime, bool solved, double timeout, double lambda) {
  return solved && runtime < timeout ? runtime : lambda * timeout;
}

double par_value(const SimulationOutcome& outcome, double timeout, double lambda) {
  return par_value(outcome.effective_time, outcome.solved, timeout, lambda);
}

SimulationOutcome simulate_schedule(const Schedule& schedule, const Scenario& scenario, InstanceIndex instance,
                                    bool charge_feature_cost) {
  const double tau = scenario.timeout();
  for (const auto& slot : schedule.slots) {
    if (slot.algorithm >= scenario.num_algorithms()) {
      throw Error("schedule references unknown algorithm index " + std::to_string(slot.algorithm));
    }
  }

  SimulationOutcome out;
  out.instance = instance;
  out.effective_time = tau;
  const double cost = charge_feature_cost ? scenario.feature_cost(instance) : 0.0;
  if (cost > tau) {
    out.failure = FailureKind::wrong_solvers;
    return out;
  }

  double elapsed = cost;
  bool could_solve = false;
  for (const auto& slot : schedule.slots) {
    if (slot.seconds <= 0.0) continue;
    if (scenario.solved(instance, slot.algorithm)) {
      could_solve = true;
      const double runtime = scenario.runtime(instance, slot.algorithm);
      if (runtime <= slot.seconds && elapsed + runtime <= tau) {
        out.solved = true;
        out.effective_time = elapsed + runtime;
        out.solving_algorithm = slot.algorithm;
        return out;
      }
    }
    elapsed += slot.seconds;
  }
  out.failure = could_solve ? FailureKind::insufficient_time : FailureKind::wrong_solvers;
  return out;
}

double vbs_par(const Scenario& scenario, std::span<const InstanceIndex> instances, double lambda) {
  if (instances.empty()) throw Error("vbs_par needs at least one instance");
  const double tau = scenario.timeout();
  double total = 0.0;
  for (auto i : instances) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
      best = std::min(best, par_value(scenario.runtime(i, a), scenario.solved(i, a), tau, lambda));
    }
    total += best;
  }
  return total / static_cast<double>(instances.size());
}

SingleBest sbs(const Scenario& scenario, std::span<const InstanceIndex> instances, double lambda) {
  if (instances.empty()) throw Error("sbs needs at least one instance");
  const double tau = scenario.timeout();
  SingleBest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
    double total = 0.0;
    for (auto i : instances) total += par_value(scenario.runtime(i, a), scenario.solved(i, a), tau, lambda);
    const double mean = total / static_cast<double>(instances.size());
    if (mean < best.par) best = {a, mean};
  }
  return best;
}

double closed_gap(double m_sbs, double m_s, double m_vbs) {
  if (!(m_sbs > m_vbs)) {
    throw UndefinedBaselineError("closed gap undefined: SBS is no worse than the VBS");
  }
  return (m_sbs - m_s) / (m_sbs - m_vbs);
}

double cmp_delta(double t, double t_other, double timeout, double delta) {
  if (t >= timeout) return 0.0;
  if (t_other >= timeout) return 1.0;
  if (std::abs(t - t_other) <= delta) return 0.5;
  return t_other / (t + t_other);
}

std::vector<double> borda_table(const std::vector<std::vector<double>>& times, double timeout, double delta) {
  std::vector<double> scores(times.size(), 0.0);
  if (times.empty()) return scores;
  const std::size_t n = times.front().size();
  for (const auto& row : times) {
    if (row.size() != n) throw Error("borda_table: selectors cover different numbers of instances");
  }
  if (n == 0) return scores;
  for (std::size_t s = 0; s < times.size(); ++s) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t o = 0; o < times.size(); ++o) {
        if (o != s) total += cmp_delta(times[s][i], times[o][i], timeout, delta);
      }
    }
    scores[s] = total / static_cast<double>(n);
  }
  return scores;
}

AggregateScores aggregate_scores(const Scenario& scenario, std::span<const SimulationOutcome> outcomes,
                                 double lambda) {
  if (outcomes.empty()) throw Error("aggregate_scores needs at least one outcome");
  const double tau = scenario.timeout();
  std::vector<InstanceIndex> instances;
  AggregateScores s;
  double total = 0.0;
  std::size_t solved = 0;
  for (const auto& o : outcomes) {
    instances.push_back(o.instance);
    total += par_value(o, tau, lambda);
    solved += o.solved ? 1 : 0;
  }
  s.par = total / static_cast<double>(outcomes.size());
  s.solved_fraction = static_cast<double>(solved) / static_cast<double>(outcomes.size());
  s.m_vbs = vbs_par(scenario, instances, lambda);
  const auto best = sbs(scenario, instances, lambda);
  s.m_sbs = best.par;
  s.sbs_algorithm = best.algorithm;
  if (s.m_sbs > s.m_vbs) s.closed_gap = closed_gap(s.m_sbs, s.par, s.m_vbs);
  s.speedup_ratio = s.par > 0.0 ? s.m_vbs / s.par : 1.0;
  return s;
}

}  // namespace sunny
