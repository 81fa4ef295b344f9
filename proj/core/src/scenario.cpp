#include "sunny/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sunny/arff.hpp"
#include "sunny/error.hpp"
#include "sunny/log.hpp"
#include "sunny/report_io.hpp"

namespace sunny {
namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ScenarioError(std::string("duplicate ") + what + " '" + id + "'");
  }
}

bool same_or_both_nan(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::optional<std::size_t> find(const std::vector<std::string>& ids, std::string_view id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids.begin());
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::map<std::string, std::string> read_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("missing mandatory file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\"'");
      const auto e = s.find_last_not_of(" \t\r\"'");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, colon));
    if (key.empty() || key.front() == '-' || key.front() == '#') continue;
    kv.emplace(lower(key), strip(line.substr(colon + 1)));
  }
  return kv;
}

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* x = std::get_if<double>(&c)) return format_number(*x);
  return "?";
}

double cell_number(const Cell& c) {
  if (const auto* x = std::get_if<double>(&c)) return *x;
  return std::nan("");
}

std::size_t require_attribute(const RelationTable& t, std::string_view name, const std::string& file) {
  auto idx = t.attribute_index(name);
  if (!idx) throw ScenarioError(file + " has no '" + std::string(name) + "' attribute");
  return *idx;
}

double repetition_of(const RelationTable& t, const std::vector<Cell>& row) {
  auto idx = t.attribute_index("repetition");
  if (!idx) return 1.0;
  const double r = cell_number(row[*idx]);
  return std::isnan(r) ? 1.0 : r;
}

}  // namespace

Scenario Scenario::create(ScenarioData data) {
  const std::size_t n = data.instance_ids.size();
  const std::size_t m = data.algorithm_ids.size();
  const std::size_t f = data.feature_names.size();
  if (m < 2) throw ScenarioError("a scenario needs at least two algorithms");
  if (!(data.timeout > 0.0) || !std::isfinite(data.timeout)) {
    throw ScenarioError("cutoff time must be positive");
  }
  require_unique(data.instance_ids, "instance id");
  require_unique(data.algorithm_ids, "algorithm id");
  require_unique(data.feature_names, "feature name");
  if (data.runtime.rows() != n || data.runtime.cols() != m || data.solved.rows() != n ||
      data.solved.cols() != m) {
    throw ScenarioError("performance matrix shape does not match instances x algorithms");
  }
  if (data.features.rows() != n || data.features.cols() != f) {
    throw ScenarioError("feature matrix shape does not match instances x features");
  }
  if (data.feature_cost) {
    if (data.feature_cost->size() != n) throw ScenarioError("feature cost length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const double c = (*data.feature_cost)[i];
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ScenarioError("invalid feature cost for instance '" + data.instance_ids[i] + "'");
      }
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data.algorithm_ids[a] < data.algorithm_ids[b]; });

  Scenario s;
  s.name_ = std::move(data.name);
  s.instance_ids_ = std::move(data.instance_ids);
  s.feature_names_ = std::move(data.feature_names);
  s.features_ = std::move(data.features);
  s.feature_cost_ = std::move(data.feature_cost);
  s.timeout_ = data.timeout;
  s.runtime_ = Matrix<double>(n, m);
  s.solved_ = Matrix<std::uint8_t>(n, m);
  for (std::size_t a = 0; a < m; ++a) s.algorithm_ids_.push_back(data.algorithm_ids[order[a]]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      const double t = data.runtime(i, order[a]);
      bool ok = data.solved(i, order[a]) != 0;
      if (ok && (!std::isfinite(t) || t < 0.0)) {
        throw ScenarioError("invalid runtime for (" + s.instance_ids_[i] + ", " + s.algorithm_ids_[a] + ")");
      }
      if (ok && t > s.timeout_) ok = false;
      s.solved_(i, a) = ok ? 1 : 0;
      s.runtime_(i, a) = ok ? t : s.timeout_;
    }
  }
  return s;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.name_ != b.name_ || a.instance_ids_ != b.instance_ids_ || a.algorithm_ids_ != b.algorithm_ids_ ||
      a.feature_names_ != b.feature_names_ || a.runtime_ != b.runtime_ || a.solved_ != b.solved_ ||
      a.feature_cost_ != b.feature_cost_ || a.timeout_ != b.timeout_) {
    return false;
  }
  const auto& x = a.features_.data();
  const auto& y = b.features_.data();
  return a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         std::equal(x.begin(), x.end(), y.begin(), y.end(), same_or_both_nan);
}

std::optional<InstanceIndex> Scenario::instance_index(std::string_view id) const { return find(instance_ids_, id); }
std::optional<AlgorithmIndex> Scenario::algorithm_index(std::string_view id) const { return find(algorithm_ids_, id); }
std::optional<std::size_t> Scenario::feature_index(std::string_view name) const { return find(feature_names_, name); }

bool Scenario::solvable(InstanceIndex i) const {
  for (std::size_t a = 0; a < num_algorithms(); ++a) {
    if (solved(i, a)) return true;
  }
  return false;
}

std::vector<InstanceIndex> Scenario::all_instances() const {
  std::vector<InstanceIndex> all(num_instances());
  std::iota(all.begin(), all.end(), InstanceIndex{0});
  return all;
}

Scenario Scenario::subset(std::span<const InstanceIndex> instances) const {
  ScenarioData d;
  d.name = name_;
  d.algorithm_ids = algorithm_ids_;
  d.feature_names = feature_names_;
  d.timeout = timeout_;
  d.runtime = Matrix<double>(instances.size(), num_algorithms());
  d.solved = Matrix<std::uint8_t>(instances.size(), num_algorithms());
  d.features = Matrix<double>(instances.size(), num_features());
  if (feature_cost_) d.feature_cost.emplace();
  for (std::size_t r = 0; r < instances.size(); ++r) {
    const auto i = instances[r];
    d.instance_ids.push_back(instance_ids_.at(i));
    for (std::size_t a = 0; a < num_algorithms(); ++a) {
      d.runtime(r, a) = runtime_(i, a);
      d.solved(r, a) = solved_(i, a);
    }
    for (std::size_t j = 0; j < num_features(); ++j) d.features(r, j) = features_(i, j);
    if (feature_cost_) d.feature_cost->push_back((*feature_cost_)[i]);
  }
  return create(std::move(d));
}

Scenario Scenario::without_feature_cost() const {
  Scenario s = *this;
  s.feature_cost_.reset();
  return s;
}

std::vector<InstanceIndex> discard_unsolvable(const Scenario& scenario, std::span<const InstanceIndex> instances) {
  std::vector<InstanceIndex> out;
  for (auto i : instances) {
    if (scenario.solvable(i)) out.push_back(i);
  }
  return out;
}

Scenario load_scenario(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw ScenarioError("not a directory: " + directory.string());
  const auto description = read_description(directory / "description.txt");
  for (const char* file : {"algorithm_runs.arff", "feature_values.arff"}) {
    if (!fs::exists(directory / file)) throw ScenarioError(std::string("missing mandatory file ") + file);
  }

  double timeout = 0.0;
  if (auto it = description.find("algorithm_cutoff_time"); it != description.end()) {
    const auto& v = it->second;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), timeout);
    if (ec != std::errc() || ptr != v.data() + v.size()) timeout = 0.0;
  } else {
    throw ScenarioError("description.txt has no algorithm_cutoff_time");
  }
  if (!(timeout > 0.0) || !std::isfinite(timeout)) throw ScenarioError("non-positive cutoff time");

  std::string name = directory.filename().string();
  if (name.empty()) name = directory.parent_path().filename().string();
  if (auto it = description.find("scenario_id"); it != description.end() && !it->second.empty()) {
    name = it->second;
  }

  // Runs.
  const RelationTable runs = read_arff_file(directory / "algorithm_runs.arff");
  const std::string runs_file = "algorithm_runs.arff";
  const auto inst_col = require_attribute(runs, "instance_id", runs_file);
  const auto alg_col = require_attribute(runs, "algorithm", runs_file);
  const auto status_col = require_attribute(runs, "runstatus", runs_file);
  std::optional<std::size_t> perf_col;
  if (auto it = description.find("performance_measures"); it != description.end() && !it->second.empty()) {
    perf_col = runs.attribute_index(it->second);
  }
  if (!perf_col) perf_col = runs.attribute_index("runtime");
  if (!perf_col) {
    for (std::size_t c = 0; c < runs.attributes.size(); ++c) {
      if (runs.attributes[c].kind == AttributeKind::numeric && lower(runs.attributes[c].name) != "repetition") {
        perf_col = c;
        break;
      }
    }
  }
  if (!perf_col) throw ScenarioError(runs_file + " has no performance column");

  struct Run {
    double repetition;
    double runtime;
    bool ok;
  };
  std::map<std::pair<std::string, std::string>, Run> run_map;
  std::vector<std::string> run_instances;
  std::set<std::string> run_instance_set;
  std::set<std::string> algorithm_set;
  for (const auto& row : runs.rows) {
    const std::string inst = cell_text(row[inst_col]);
    const std::string alg = cell_text(row[alg_col]);
    const double rep = repetition_of(runs, row);
    const bool ok = lower(cell_text(row[status_col])) == "ok";
    Run run{rep, cell_number(row[*perf_col]), ok};
    auto [it, inserted] = run_map.emplace(std::make_pair(inst, alg), run);
    if (!inserted && rep < it->second.repetition) it->second = run;
    if (run_instance_set.insert(inst).second) run_instances.push_back(inst);
    algorithm_set.insert(alg);
  }

  // Features.
  const RelationTable feats = read_arff_file(directory / "feature_values.arff");
  const auto f_inst_col = require_attribute(feats, "instance_id", "feature_values.arff");
  const auto f_rep_col = feats.attribute_index("repetition");
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < feats.attributes.size(); ++c) {
    if (c == f_inst_col || (f_rep_col && c == *f_rep_col)) continue;
    if (feats.attributes[c].kind != AttributeKind::numeric) {
      log_warning("ignoring non-numeric feature '" + feats.attributes[c].name + "'");
      continue;
    }
    feature_cols.push_back(c);
    feature_names.push_back(feats.attributes[c].name);
  }
  std::map<std::string, std::pair<double, std::size_t>> feature_row;  // instance -> (repetition, row)
  std::vector<std::string> feature_instances;
  for (std::size_t r = 0; r < feats.rows.size(); ++r) {
    const std::string inst = cell_text(feats.rows[r][f_inst_col]);
    const double rep = repetition_of(feats, feats.rows[r]);
    auto [it, inserted] = feature_row.emplace(inst, std::make_pair(rep, r));
    if (inserted) {
      feature_instances.push_back(inst);
    } else if (rep < it->second.first) {
      it->second = {rep, r};
    }
  }

  std::vector<std::string> instances;
  for (const auto& inst : feature_instances) {
    if (run_instance_set.count(inst)) instances.push_back(inst);
  }
  const std::size_t dropped_runs = run_instances.size() - instances.size();
  const std::size_t dropped_feats = feature_instances.size() - instances.size();
  if (dropped_runs > 0) {
    log_warning(std::to_string(dropped_runs) + " instance(s) with runs but no features dropped");
  }
  if (dropped_feats > 0) {
    log_warning(std::to_string(dropped_feats) + " instance(s) with features but no runs dropped");
  }
  if (instances.empty()) throw ScenarioError("no instance has both runs and features");

  ScenarioData d;
  d.name = name;
  d.instance_ids = instances;
  d.algorithm_ids.assign(algorithm_set.begin(), algorithm_set.end());
  d.feature_names = feature_names;
  d.timeout = timeout;
  const std::size_t n = instances.size();
  const std::size_t m = d.algorithm_ids.size();
  d.runtime = Matrix<double>(n, m);
  d.solved = Matrix<std::uint8_t>(n, m);
  d.features = Matrix<double>(n, feature_names.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      auto it = run_map.find({instances[i], d.algorithm_ids[a]});
      if (it == run_map.end()) {
        throw ScenarioError("no run for (" + instances[i] + ", " + d.algorithm_ids[a] + ")");
      }
      const Run& run = it->second;
      if (run.ok) {
        if (std::isnan(run.runtime)) {
          throw ScenarioError("run (" + instances[i] + ", " + d.algorithm_ids[a] + ") is ok but has no runtime");
        }
        if (run.runtime < 0.0) {
          throw ScenarioError("negative runtime for (" + instances[i] + ", " + d.algorithm_ids[a] + ")");
        }
      }
      d.solved(i, a) = run.ok ? 1 : 0;
      d.runtime(i, a) = run.ok ? run.runtime : timeout;
    }
    const auto& row = feats.rows[feature_row.at(instances[i]).second];
    for (std::size_t j = 0; j < feature_cols.size(); ++j) d.features(i, j) = cell_number(row[feature_cols[j]]);
  }

  if (std::filesystem::exists(directory / "feature_costs.arff")) {
    const RelationTable costs = read_arff_file(directory / "feature_costs.arff");
    const auto c_inst_col = require_attribute(costs, "instance_id", "feature_costs.arff");
    const auto c_rep_col = costs.attribute_index("repetition");
    std::map<std::string, std::pair<double, double>> cost_of;  // instance -> (repetition, total)
    for (const auto& row : costs.rows) {
      double total = 0.0;
      for (std::size_t c = 0; c < costs.attributes.size(); ++c) {
        if (c == c_inst_col || (c_rep_col && c == *c_rep_col)) continue;
        const double x = cell_number(row[c]);
        if (!std::isnan(x)) total += x;
      }
      const double rep = repetition_of(costs, row);
      auto [it, inserted] = cost_of.emplace(cell_text(row[c_inst_col]), std::make_pair(rep, total));
      if (!inserted && rep < it->second.first) it->second = {rep, total};
    }
    d.feature_cost.emplace(n, 0.0);
    std::size_t without_cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = cost_of.find(instances[i]);
      if (it == cost_of.end()) {
        ++without_cost;
      } else {
        (*d.feature_cost)[i] = it->second.second;
      }
    }
    if (without_cost > 0) {
      log_warning(std::to_string(without_cost) + " instance(s) missing from feature_costs.arff; cost 0 assumed");
    }
  }

  return Scenario::create(std::move(d));
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  {
    std::ofstream out(directory / "description.txt");
    out << "scenario_id: " << scenario.name() << '\n'
        << "performance_measures: runtime\n"
        << "maximize: false\n"
        << "performance_type: runtime\n"
        << "algorithm_cutoff_time: " << format_number(scenario.timeout()) << '\n';
    if (!out) throw Error("cannot write description.txt");
  }

  RelationTable runs;
  runs.relation_name = "ALGORITHM_RUNS_" + scenario.name();
  runs.attributes = {{"instance_id", AttributeKind::text, {}},
                     {"repetition", AttributeKind::numeric, {}},
                     {"algorithm", AttributeKind::text, {}},
                     {"runtime", AttributeKind::numeric, {}},
                     {"runstatus", AttributeKind::nominal, {"ok", "timeout", "memout", "not_applicable", "crash", "other"}}};
  for (std::size_t i = 0; i < scenario.num_instances(); ++i) {
    for (std::size_t a = 0; a < scenario.num_algorithms(); ++a) {
      runs.rows.push_back({scenario.instance_ids()[i], 1.0, scenario.algorithm_ids()[a], scenario.runtime(i, a),
                           std::string(scenario.solved(i, a) ? "ok" : "timeout")});
    }
  }

  RelationTable feats;
  feats.relation_name = "FEATURE_VALUES_" + scenario.name();
  feats.attributes = {{"instance_id", AttributeKind::text, {}}, {"repetition", AttributeKind::numeric, {}}};
  for (const auto& f : scenario.feature_names()) feats.attributes.push_back({f, AttributeKind::numeric, {}});
  for (std::size_t i = 0; i < scenario.num_instances(); ++i) {
    std::vector<Cell> row{scenario.instance_ids()[i], 1.0};
    for (double x : scenario.features(i)) {
      if (std::isnan(x)) {
        row.emplace_back(Missing{});
      } else {
        row.emplace_back(x);
      }
    }
    feats.rows.push_back(std::move(row));
  }

  auto write = [&](const RelationTable& t, const char* file) {
    std::ofstream out(directory / file);
    write_arff(out, t);
    if (!out) throw Error(std::string("cannot write ") + file);
  };
  write(runs, "algorithm_runs.arff");
  write(feats, "feature_values.arff");

  if (scenario.has_feature_cost()) {
    RelationTable costs;
    costs.relation_name = "FEATURE_COSTS_" + scenario.name();
    costs.attributes = {{"instance_id", AttributeKind::text, {}},
                        {"repetition", AttributeKind::numeric, {}},
                        {"all_features", AttributeKind::numeric, {}}};
    for (std::size_t i = 0; i < scenario.num_instances(); ++i) {
      costs.rows.push_back({scenario.instance_ids()[i], 1.0, scenario.feature_cost(i)});
    }
    write(costs, "feature_costs.arff");
  } else if (fs::exists(directory / "feature_costs.arff")) {
    fs::remove(directory / "feature_costs.arff");
  }
}

}  // namespace sunny
