#include "sunny/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sunny/error.hpp"

namespace sunny {
namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json config_json(const TrainingConfig& c) {
  return Json{{"split_mode", to_string(c.split_mode)},
              {"instance_limit", c.instance_limit},
              {"feature_limit", c.feature_limit},
              {"k_max", c.k_max},
              {"schedule_limit", c.schedule_limit},
              {"seed", c.seed},
              {"time_cap", c.time_cap_seconds},
              {"learning_mode", to_string(c.learning_mode)},
              {"engine_train", to_string(c.engine_train)},
              {"engine_test", to_string(c.engine_test)},
              {"charge_feature_cost", c.charge_feature_cost},
              {"par_penalty", c.par_penalty},
              {"outer_folds", c.outer_folds},
              {"inner_folds", c.inner_folds},
              {"repetitions", c.repetitions}};
}

std::string join_features(const LearnedModel& model, const Scenario& scenario) {
  std::string out;
  for (std::size_t i = 0; i < model.features.size(); ++i) {
    if (i) out += ';';
    out += scenario.feature_names().at(model.features[i]);
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string model_to_json(const LearnedModel& model, const Scenario& scenario) {
  Json features = Json::array();
  for (auto f : model.features) features.push_back(scenario.feature_names().at(f));
  Json training = Json::array();
  for (auto i : model.training) training.push_back(scenario.instance_ids().at(i));
  Json lineage{{"seed", model.lineage.seed}};
  lineage["repetition"] = model.lineage.repetition ? Json(*model.lineage.repetition) : Json(nullptr);
  lineage["fold"] = model.lineage.fold ? Json(*model.lineage.fold) : Json(nullptr);
  Json j{{"scenario", model.scenario_name},
         {"learning_mode", to_string(model.learning_mode)},
         {"features", features},
         {"k", model.k},
         {"backup", scenario.algorithm_ids().at(model.backup)},
         {"engine", to_string(model.engine)},
         {"schedule_limit", model.schedule_limit},
         {"seed_lineage", lineage},
         {"validation_score", number_or_null(model.validation_score)},
         {"timed_out", model.timed_out},
         {"training_instances", training}};
  return j.dump(2) + "\n";
}

LearnedModel model_from_json(const std::string& text, const Scenario& scenario) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    LearnedModel m;
    m.scenario_name = j.at("scenario").get<std::string>();
    m.learning_mode = parse_learning_mode(j.at("learning_mode").get<std::string>());
    for (const auto& name : j.at("features")) {
      auto idx = scenario.feature_index(name.get<std::string>());
      if (!idx) throw ScenarioError("model feature '" + name.get<std::string>() + "' is not in the scenario");
      m.features.push_back(*idx);
    }
    m.k = j.at("k").get<std::size_t>();
    const auto backup = j.at("backup").get<std::string>();
    auto b = scenario.algorithm_index(backup);
    if (!b) throw ScenarioError("model backup solver '" + backup + "' is not in the scenario");
    m.backup = *b;
    m.engine = parse_engine(j.at("engine").get<std::string>());
    m.schedule_limit = j.at("schedule_limit").get<std::size_t>();
    const auto& lin = j.at("seed_lineage");
    m.lineage.seed = lin.at("seed").get<std::uint64_t>();
    if (!lin.at("repetition").is_null()) m.lineage.repetition = lin.at("repetition").get<std::size_t>();
    if (!lin.at("fold").is_null()) m.lineage.fold = lin.at("fold").get<std::size_t>();
    const auto& vs = j.at("validation_score");
    m.validation_score = vs.is_null() ? -std::numeric_limits<double>::infinity() : vs.get<double>();
    m.timed_out = j.value("timed_out", false);
    for (const auto& id : j.at("training_instances")) {
      auto idx = scenario.instance_index(id.get<std::string>());
      if (!idx) throw ScenarioError("model training instance '" + id.get<std::string>() + "' is not in the scenario");
      m.training.push_back(*idx);
    }
    if (m.training.empty()) throw ScenarioError("model has no training instances");
    if (m.features.empty()) throw ScenarioError("model has no features");
    return m;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const LearnedModel& model, const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << model_to_json(model, scenario);
  if (!out) throw Error("cannot write " + path.string());
}

LearnedModel load_model(const std::filesystem::path& path, const Scenario& scenario) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str(), scenario);
}

void write_outcomes_csv(std::ostream& out, const Scenario& scenario, std::span<const SimulationOutcome> outcomes,
                        const AggregateScores& scores, double lambda) {
  const double tau = scenario.timeout();
  out << "kind,instance_id,solved,effective_time,par,solving_algorithm,failure_kind,"
         "par_mean,solved_fraction,m_vbs,m_sbs,sbs_algorithm,closed_gap,speedup_ratio\n";
  for (const auto& o : outcomes) {
    out << "instance," << csv_field(scenario.instance_ids().at(o.instance)) << ',' << (o.solved ? 1 : 0) << ','
        << format_number(o.effective_time) << ',' << format_number(par_value(o, tau, lambda)) << ','
        << (o.solving_algorithm ? csv_field(scenario.algorithm_ids().at(*o.solving_algorithm)) : "") << ','
        << (o.failure ? to_string(*o.failure) : "") << ",,,,,,,\n";
  }
  out << "aggregate,,,,,,," << format_number(scores.par) << ',' << format_number(scores.solved_fraction) << ','
      << format_number(scores.m_vbs) << ',' << format_number(scores.m_sbs) << ','
      << csv_field(scenario.algorithm_ids().at(scores.sbs_algorithm)) << ','
      << (scores.closed_gap ? format_number(*scores.closed_gap) : "undefined") << ','
      << format_number(scores.speedup_ratio) << '\n';
}

std::string outcomes_to_json(const Scenario& scenario, std::span<const SimulationOutcome> outcomes,
                             const AggregateScores& scores, double lambda) {
  Json rows = Json::array();
  for (const auto& o : outcomes) {
    rows.push_back({{"instance_id", scenario.instance_ids().at(o.instance)},
                    {"solved", o.solved},
                    {"effective_time", o.effective_time},
                    {"par", par_value(o, scenario.timeout(), lambda)},
                    {"solving_algorithm",
                     o.solving_algorithm ? Json(scenario.algorithm_ids().at(*o.solving_algorithm)) : Json(nullptr)},
                    {"failure_kind", o.failure ? Json(to_string(*o.failure)) : Json(nullptr)}});
  }
  Json agg{{"par", scores.par},
           {"solved_fraction", scores.solved_fraction},
           {"m_vbs", scores.m_vbs},
           {"m_sbs", scores.m_sbs},
           {"sbs_algorithm", scenario.algorithm_ids().at(scores.sbs_algorithm)},
           {"closed_gap", scores.closed_gap ? Json(*scores.closed_gap) : Json(nullptr)},
           {"speedup_ratio", scores.speedup_ratio}};
  Json j{{"scenario", scenario.name()}, {"par_penalty", lambda}, {"outcomes", rows}, {"aggregate", agg}};
  return j.dump(2) + "\n";
}

void write_times_csv(std::ostream& out, const Scenario& scenario, std::span<const SimulationOutcome> outcomes) {
  out << "instance_id,seconds\n";
  for (const auto& o : outcomes) {
    out << csv_field(scenario.instance_ids().at(o.instance)) << ','
        << format_number(o.solved ? o.effective_time : scenario.timeout()) << '\n';
  }
}

void write_experiment_csv(std::ostream& out, const ExperimentReport& report, const Scenario& scenario) {
  out << "# scenario=" << report.scenario_name << " seed=" << report.config.seed
      << " mode=" << to_string(report.config.learning_mode) << '\n';
  out << "repetition,fold,status,closed_gap,par10,solved_fraction,m_sbs,m_vbs,k,backup,features\n";
  for (const auto& f : report.folds) {
    out << f.repetition << ',' << f.fold << ',' << (f.status == FoldStatus::ok ? "ok" : "timeout") << ','
        << (f.closed_gap_defined ? format_number(f.closed_gap) : "undefined") << ',' << format_number(f.scores.par)
        << ',' << format_number(f.scores.solved_fraction) << ',' << format_number(f.scores.m_sbs) << ','
        << format_number(f.scores.m_vbs) << ',' << f.model.k << ','
        << csv_field(scenario.algorithm_ids().at(f.model.backup)) << ','
        << csv_field(join_features(f.model, scenario)) << '\n';
  }
}

std::string experiment_to_json(const ExperimentReport& report, const Scenario& scenario) {
  Json folds = Json::array();
  for (const auto& f : report.folds) {
    Json features = Json::array();
    for (auto x : f.model.features) features.push_back(scenario.feature_names().at(x));
    folds.push_back({{"repetition", f.repetition},
                     {"fold", f.fold},
                     {"status", f.status == FoldStatus::ok ? "ok" : "timeout"},
                     {"closed_gap", f.closed_gap_defined ? Json(f.closed_gap) : Json(nullptr)},
                     {"par10", f.scores.par},
                     {"solved_fraction", f.scores.solved_fraction},
                     {"m_sbs", f.scores.m_sbs},
                     {"m_vbs", f.scores.m_vbs},
                     {"k", f.model.k},
                     {"features", features},
                     {"backup", scenario.algorithm_ids().at(f.model.backup)},
                     {"test_instances", f.test.size()}});
  }
  Json j{{"scenario", report.scenario_name},
         {"seed", report.config.seed},
         {"config", config_json(report.config)},
         {"mean_closed_gap", report.mean_closed_gap()},
         {"mean_par10", report.mean_par()},
         {"mean_solved_fraction", report.mean_solved_fraction()},
         {"folds", folds}};
  return j.dump(2) + "\n";
}

void write_timings_csv(std::ostream& out, const ExperimentReport& report) {
  out << "repetition,fold,wall_seconds\n";
  for (const auto& f : report.folds) out << f.repetition << ',' << f.fold << ',' << format_number(f.wall_seconds) << '\n';
}

std::string config_to_json(const TrainingConfig& config) { return config_json(config).dump(2) + "\n"; }

}  // namespace sunny
