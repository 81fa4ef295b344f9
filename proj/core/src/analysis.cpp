#include "sunny/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sunny/error.hpp"
#include "sunny/report_io.hpp"

namespace sunny {
namespace {

std::set<InstanceIndex> nearest_excluding(std::span<const double> query, const Matrix<double>& points,
                                          std::span<const InstanceIndex> ids, InstanceIndex self, std::size_t k) {
  const auto nb = knn(query, points, k + 1);
  std::set<InstanceIndex> out;
  for (auto r : nb.rows) {
    if (ids[r] == self) continue;
    if (out.size() == k) break;
    out.insert(ids[r]);
  }
  return out;
}

}  // namespace

double jaccard_index(const std::set<InstanceIndex>& a, const std::set<InstanceIndex>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (auto x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

JaccardReport jaccard_neighborhoods(const Selector& selector, std::span<const InstanceIndex> instances,
                                    std::size_t k) {
  const Scenario& s = selector.scenario();
  const auto& training = selector.training();
  if (k < 1 || k > training.size()) throw Error("jaccard_neighborhoods: k must lie in [1, training size]");

  Matrix<double> perf(training.size(), s.num_algorithms());
  for (std::size_t r = 0; r < training.size(); ++r) {
    for (std::size_t a = 0; a < s.num_algorithms(); ++a) perf(r, a) = s.effective_runtime(training[r], a);
  }

  JaccardReport report;
  double total = 0.0;
  std::vector<double> perf_query(s.num_algorithms());
  for (auto i : instances) {
    const auto feature_query = selector.transform().apply(s.features(i), selector.params().features);
    for (std::size_t a = 0; a < s.num_algorithms(); ++a) perf_query[a] = s.effective_runtime(i, a);
    const auto f_set = nearest_excluding(feature_query, selector.training_features(), training, i, k);
    const auto p_set = nearest_excluding(perf_query, perf, training, i, k);
    const double j = jaccard_index(f_set, p_set);
    report.instances.push_back(i);
    report.per_instance.push_back(j);
    total += j;
  }
  report.mean = instances.empty() ? 0.0 : total / static_cast<double>(instances.size());
  return report;
}

JaccardSummary summarize_jaccard(const std::vector<std::vector<JaccardReport>>& reports) {
  JaccardSummary summary;
  for (const auto& repetition : reports) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& r : repetition) {
      for (double j : r.per_instance) total += j;
      n += r.per_instance.size();
    }
    summary.per_repetition.push_back(n ? total / static_cast<double>(n) : 0.0);
  }
  if (!summary.per_repetition.empty()) {
    double total = 0.0;
    for (double m : summary.per_repetition) total += m;
    summary.grand_mean = total / static_cast<double>(summary.per_repetition.size());
  }
  return summary;
}

UnsolvedBreakdown classify_unsolved(std::span<const SimulationOutcome> outcomes) {
  UnsolvedBreakdown b;
  b.total = outcomes.size();
  for (const auto& o : outcomes) {
    if (o.solved) {
      ++b.solved;
    } else if (o.failure == FailureKind::insufficient_time) {
      ++b.insufficient_time;
    } else {
      ++b.wrong_solvers;
    }
  }
  const std::size_t unsolved = b.total - b.solved;
  if (unsolved > 0) {
    b.wrong_solvers_fraction = static_cast<double>(b.wrong_solvers) / static_cast<double>(unsolved);
    b.insufficient_time_fraction = static_cast<double>(b.insufficient_time) / static_cast<double>(unsolved);
  }
  return b;
}

ScheduleSizeStats schedule_size_stats(std::span<const Schedule> schedules) {
  if (schedules.empty()) throw Error("schedule_size_stats: no schedules");
  ScheduleSizeStats stats;
  stats.count = schedules.size();
  double sum = 0.0;
  for (const auto& s : schedules) sum += static_cast<double>(s.size());
  stats.mean = sum / static_cast<double>(schedules.size());
  double sq = 0.0;
  for (const auto& s : schedules) {
    const double d = static_cast<double>(s.size()) - stats.mean;
    sq += d * d;
  }
  stats.stddev = std::sqrt(sq / static_cast<double>(schedules.size()));
  return stats;
}

void runtime_distribution_export(std::ostream& out, const Scenario& scenario,
                                 std::span<const SimulationOutcome> selector_outcomes, double lambda) {
  using Entry = std::pair<double, bool>;
  std::vector<InstanceIndex> instances;
  for (const auto& o : selector_outcomes) instances.push_back(o.instance);
  std::vector<Entry> sbs_col, vbs_col, sel_col;
  if (!instances.empty()) {
    const auto best = sbs(scenario, instances, lambda).algorithm;
    for (const auto& o : selector_outcomes) {
      const auto i = o.instance;
      sbs_col.emplace_back(scenario.effective_runtime(i, best), scenario.solved(i, best));
      Entry v{scenario.timeout(), false};
      for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
        if (scenario.solved(i, a) && (!v.second || scenario.runtime(i, a) < v.first)) {
          v = {scenario.runtime(i, a), true};
        }
      }
      vbs_col.push_back(v);
      sel_col.emplace_back(o.solved ? o.effective_time : scenario.timeout(), o.solved);
    }
  }
  auto by_time = [](const Entry& a, const Entry& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  };
  std::sort(sbs_col.begin(), sbs_col.end(), by_time);
  std::sort(vbs_col.begin(), vbs_col.end(), by_time);
  std::sort(sel_col.begin(), sel_col.end(), by_time);
  out << "rank,sbs_time,sbs_solved,vbs_time,vbs_solved,selector_time,selector_solved\n";
  for (std::size_t r = 0; r < sel_col.size(); ++r) {
    out << r + 1 << ',' << format_number(sbs_col[r].first) << ',' << sbs_col[r].second << ','
        << format_number(vbs_col[r].first) << ',' << vbs_col[r].second << ',' << format_number(sel_col[r].first)
        << ',' << sel_col[r].second << '\n';
  }
}

ScenarioIndicators scenario_indicators(const Scenario& scenario, std::span<const InstanceIndex> instances,
                                       double lambda) {
  ScenarioIndicators ind;
  const auto best = sbs(scenario, instances, lambda);
  for (auto i : instances) ind.sbs_unsolved += scenario.solved(i, best.algorithm) ? 0 : 1;
  const double vbs = vbs_par(scenario, instances, lambda);
  ind.vbs_speedup = vbs > 0.0 ? best.par / vbs : std::numeric_limits<double>::infinity();
  return ind;
}

}  // namespace sunny
