#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "settings.hpp"
#include "sunny/analysis.hpp"
#include "sunny/error.hpp"
#include "sunny/log.hpp"
#include "sunny/metrics.hpp"
#include "sunny/report_io.hpp"
#include "sunny/scenario.hpp"
#include "sunny/synthetic.hpp"
#include "sunny/training.hpp"

namespace sunny::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Options {
  Settings flags;
  std::string config_path;
  std::string scenario_dir;
  std::string model_path;
  std::string output;
  std::string instances_file;
  std::vector<std::string> instance_ids;
  bool all_instances = false;
  bool verbose = false;
  bool quiet = false;

  // compare
  std::vector<std::string> inputs;
  double timeout = 0.0;
  std::vector<double> deltas{0.0};

  SyntheticConfig synth;
};

void add_config_options(CLI::App* app, Options& o) {
  auto flag = [&](const char* name, const char* key, const char* help) {
    app->add_option_function<std::string>(
        name, [&o, key](const std::string& v) { o.flags[key] = v; }, help);
  };
  app->add_option("--config", o.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  flag("--mode", "learning_mode", "Learning mode: fk, k, f or none");
  flag("--split-mode", "split_mode", "Inner split: random, stratified or rank");
  flag("--instance-limit", "instance_limit", "Training instance limit");
  flag("--feature-limit", "feature_limit", "Maximum number of selected features");
  flag("--k-max", "k_max", "Largest neighborhood size tried");
  flag("--schedule-limit", "schedule_limit", "Maximum solvers in a greedy schedule");
  flag("--seed", "seed", "Random seed");
  flag("--time-cap", "time_cap", "Training time cap per fold, seconds");
  flag("--engine-train", "engine_train", "Selection engine while learning: greedy or exhaustive");
  flag("--engine-test", "engine_test", "Selection engine at test time: greedy or exhaustive");
  app->add_option_function<std::string>(
      "--engine",
      [&o](const std::string& v) {
        o.flags["engine_train"] = v;
        o.flags["engine_test"] = v;
      },
      "Sets both engines");
  flag("--charge-feature-cost", "charge_feature_cost", "Charge feature computation cost: true or false");
  flag("--par-penalty", "par_penalty", "PAR penalty factor");
  flag("--outer-folds", "outer_folds", "Outer cross-validation folds");
  flag("--inner-folds", "inner_folds", "Inner cross-validation folds");
  flag("--repetitions", "repetitions", "Cross-validation repetitions");
  flag("--jobs", "jobs", "Worker threads, 0 = all cores");
}

TrainingConfig resolve_config(const Options& o) {
  Settings s;
  if (!o.config_path.empty()) merge_into(s, read_config_file(o.config_path));
  merge_into(s, environment_settings());
  merge_into(s, o.flags);
  return make_config(s);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}

std::string report_header(const Scenario& s, const TrainingConfig& c) {
  return "# scenario=" + s.name() + " seed=" + std::to_string(c.seed) + "\n";
}

std::vector<std::string> read_id_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance list " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ids.push_back(line);
  }
  return ids;
}

std::vector<InstanceIndex> resolve_ids(const Scenario& s, const std::vector<std::string>& ids) {
  std::vector<InstanceIndex> out;
  for (const auto& id : ids) {
    const auto i = s.instance_index(id);
    if (!i) throw ScenarioError("unknown instance id '" + id + "'");
    out.push_back(*i);
  }
  return out;
}

std::string feature_list(const Scenario& s, const std::vector<std::size_t>& features) {
  std::string out;
  for (std::size_t j = 0; j < features.size(); ++j) out += (j ? "," : "") + s.feature_names().at(features[j]);
  return out;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const Scenario s = load_scenario(o.scenario_dir);
  std::vector<InstanceIndex> train =
      o.instances_file.empty() ? s.all_instances() : resolve_ids(s, read_id_list(o.instances_file));
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(std::min(config.time_cap_seconds, 1e9)));
  const auto model = train_model(s, train, config, SeedLineage{config.seed, {}, {}}, deadline);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  const fs::path path = o.output.empty() ? fs::path("model.json") : fs::path(o.output);
  write_file(path, model_to_json(model, s));
  out << "features: " << feature_list(s, model.features) << '\n'
      << "k: " << model.k << '\n'
      << "backup: " << s.algorithm_ids().at(model.backup) << '\n'
      << "training instances: " << model.training.size() << '\n'
      << "elapsed seconds: " << format_number(std::round(elapsed * 1000.0) / 1000.0) << '\n'
      << "model: " << path.string() << '\n';
  if (model.timed_out) out << "warning: time cap reached, kept the best configuration found\n";
  return 0;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const Scenario s = load_scenario(o.scenario_dir);
  const auto model = load_model(o.model_path, s);
  const Selector selector = make_selector(s, model);
  std::vector<InstanceIndex> targets;
  if (o.all_instances) {
    targets = s.all_instances();
  } else {
    auto ids = o.instance_ids;
    if (!o.instances_file.empty()) {
      const auto more = read_id_list(o.instances_file);
      ids.insert(ids.end(), more.begin(), more.end());
    }
    if (ids.empty()) throw Error("no instances requested (use --instance, --instances or --all)");
    targets = resolve_ids(s, ids);
  }
  std::ostringstream text;
  for (auto i : targets) {
    text << "{\"instance_id\":" << Json(s.instance_ids()[i]).dump()
         << ",\"schedule\":" << schedule_to_json(selector.schedule(i), s) << "}\n";
  }
  if (o.output.empty()) {
    out << text.str();
  } else {
    write_file(o.output, text.str());
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const Scenario s = load_scenario(o.scenario_dir);
  const auto model = load_model(o.model_path, s);
  std::vector<InstanceIndex> test;
  if (!o.instances_file.empty()) {
    test = resolve_ids(s, read_id_list(o.instances_file));
  } else {
    const std::set<InstanceIndex> seen(model.training.begin(), model.training.end());
    for (auto i : s.all_instances()) {
      if (!seen.count(i)) test.push_back(i);
    }
  }
  if (test.empty()) throw Error("no held-out instances to evaluate");
  const Selector selector = make_selector(s, model);
  const bool charge = config.charge_feature_cost && s.has_feature_cost();
  std::vector<SimulationOutcome> outcomes;
  for (auto i : test) outcomes.push_back(simulate_schedule(selector.schedule(i), s, i, charge));
  const auto scores = aggregate_scores(s, outcomes, config.par_penalty);

  const fs::path dir = o.output.empty() ? fs::path("evaluation") : fs::path(o.output);
  std::ostringstream csv, times;
  TrainingConfig header_config = config;
  header_config.seed = model.lineage.seed;
  csv << report_header(s, header_config);
  write_outcomes_csv(csv, s, outcomes, scores, config.par_penalty);
  times << report_header(s, header_config);
  write_times_csv(times, s, outcomes);
  write_file(dir / "outcomes.csv", csv.str());
  write_file(dir / "outcomes.json", outcomes_to_json(s, outcomes, scores, config.par_penalty));
  write_file(dir / "times.csv", times.str());
  out << "instances: " << outcomes.size() << '\n'
      << "par" << format_number(config.par_penalty) << ": " << format_number(scores.par) << '\n'
      << "solved: " << format_number(scores.solved_fraction) << '\n'
      << "closed gap: " << (scores.closed_gap ? format_number(*scores.closed_gap) : std::string("undefined")) << '\n';
  return 0;
}

void write_experiment(const fs::path& dir, const ExperimentReport& report, const Scenario& s) {
  std::ostringstream csv, timings;
  write_experiment_csv(csv, report, s);
  write_file(dir / "experiment.csv", csv.str());
  write_file(dir / "experiment.json", experiment_to_json(report, s));
  for (const auto& f : report.folds) {
    write_file(dir / "models" / ("model_r" + std::to_string(f.repetition) + "_f" + std::to_string(f.fold) + ".json"),
               model_to_json(f.model, s));
  }
  write_timings_csv(timings, report);
  write_file(dir / "timings.csv", timings.str());
}

int cmd_cv(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const Scenario s = load_scenario(o.scenario_dir);
  const auto report = run_nested_cv(s, config);
  const fs::path dir = o.output.empty() ? fs::path("cv") : fs::path(o.output);
  write_experiment(dir, report, s);
  out << "folds: " << report.folds.size() << '\n'
      << "mean closed gap: " << format_number(report.mean_closed_gap()) << '\n'
      << "mean par" << format_number(config.par_penalty) << ": " << format_number(report.mean_par()) << '\n'
      << "mean solved: " << format_number(report.mean_solved_fraction()) << '\n'
      << "reports: " << dir.string() << '\n';
  return 0;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const Scenario s = load_scenario(o.scenario_dir);
  const auto report = run_nested_cv(s, config);
  const fs::path dir = o.output.empty() ? fs::path("analysis") : fs::path(o.output);
  write_experiment(dir, report, s);

  std::vector<std::vector<JaccardReport>> by_rep(config.repetitions);
  std::ostringstream jcsv;
  jcsv << report_header(s, config) << "repetition,fold,instance_id,jaccard\n";
  std::vector<SimulationOutcome> all_outcomes;
  std::vector<Schedule> all_schedules;
  for (const auto& f : report.folds) {
    all_outcomes.insert(all_outcomes.end(), f.outcomes.begin(), f.outcomes.end());
    all_schedules.insert(all_schedules.end(), f.schedules.begin(), f.schedules.end());
    if (f.model.training.size() < 2) continue;
    const Selector selector = make_selector(s, f.model);
    const std::size_t k = std::min(f.model.k, f.model.training.size() - 1);
    auto j = jaccard_neighborhoods(selector, f.model.training, k);
    for (std::size_t r = 0; r < j.instances.size(); ++r) {
      jcsv << f.repetition << ',' << f.fold << ',' << s.instance_ids()[j.instances[r]] << ','
           << format_number(j.per_instance[r]) << '\n';
    }
    by_rep.at(f.repetition).push_back(std::move(j));
  }
  write_file(dir / "jaccard.csv", jcsv.str());

  const auto jsum = summarize_jaccard(by_rep);
  const auto unsolved = classify_unsolved(all_outcomes);
  const auto all = s.all_instances();
  const auto indicators = scenario_indicators(s, all, config.par_penalty);

  // Every repetition covers each instance once; the first one feeds the
  // runtime distribution.
  std::vector<SimulationOutcome> first_rep;
  for (const auto& f : report.folds) {
    if (f.repetition == 0) first_rep.insert(first_rep.end(), f.outcomes.begin(), f.outcomes.end());
  }
  std::sort(first_rep.begin(), first_rep.end(),
            [](const SimulationOutcome& a, const SimulationOutcome& b) { return a.instance < b.instance; });
  std::ostringstream dist;
  dist << report_header(s, config);
  runtime_distribution_export(dist, s, first_rep, config.par_penalty);
  write_file(dir / "runtime_distribution.csv", dist.str());

  Json summary{{"scenario", s.name()},
               {"seed", config.seed},
               {"mean_closed_gap", report.mean_closed_gap()},
               {"mean_par", report.mean_par()},
               {"mean_solved_fraction", report.mean_solved_fraction()},
               {"jaccard", {{"per_repetition", jsum.per_repetition}, {"grand_mean", jsum.grand_mean}}},
               {"unsolved",
                {{"total", unsolved.total},
                 {"solved", unsolved.solved},
                 {"wrong_solvers", unsolved.wrong_solvers},
                 {"insufficient_time", unsolved.insufficient_time},
                 {"wrong_solvers_fraction", unsolved.wrong_solvers_fraction},
                 {"insufficient_time_fraction", unsolved.insufficient_time_fraction}}},
               {"indicators", {{"sbs_unsolved", indicators.sbs_unsolved}, {"vbs_speedup", indicators.vbs_speedup}}}};
  if (!all_schedules.empty()) {
    const auto sizes = schedule_size_stats(all_schedules);
    summary["schedule_size"] = {{"mean", sizes.mean}, {"stddev", sizes.stddev}, {"count", sizes.count}};
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  out << "mean closed gap: " << format_number(report.mean_closed_gap()) << '\n'
      << "jaccard grand mean: " << format_number(jsum.grand_mean) << '\n'
      << "unsolved: " << unsolved.wrong_solvers << " wrong solvers, " << unsolved.insufficient_time
      << " insufficient time\n"
      << "reports: " << dir.string() << '\n';
  return 0;
}

std::vector<std::pair<std::string, double>> read_times(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::pair<std::string, double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw Error(path.string() + ":" + std::to_string(number) + ": expected id,seconds");
    std::string id = line.substr(0, comma);
    if (id.size() >= 2 && id.front() == '"' && id.back() == '"') id = id.substr(1, id.size() - 2);
    const std::string value = line.substr(comma + 1);
    try {
      std::size_t used = 0;
      const double t = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      rows.emplace_back(id, t);
    } catch (const std::exception&) {
      if (rows.empty() && number <= 2) continue;  // header row
      throw Error(path.string() + ":" + std::to_string(number) + ": bad time '" + value + "'");
    }
  }
  return rows;
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (!(o.timeout > 0)) throw ConfigError("--timeout must be positive");
  std::vector<std::string> names;
  std::vector<std::map<std::string, double>> tables;
  std::vector<std::string> order;
  for (const auto& input : o.inputs) {
    const auto rows = read_times(input);
    std::map<std::string, double> table;
    for (const auto& [id, t] : rows) {
      if (!table.emplace(id, t).second) throw Error(input + ": duplicate instance '" + id + "'");
    }
    if (tables.empty()) {
      for (const auto& r : rows) order.push_back(r.first);
    } else if (table.size() != tables.front().size() ||
               !std::equal(table.begin(), table.end(), tables.front().begin(),
                           [](const auto& a, const auto& b) { return a.first == b.first; })) {
      throw Error(input + ": instance set differs from " + o.inputs.front());
    }
    tables.push_back(std::move(table));
    std::string name = fs::path(input).stem().string();
    if (std::find(names.begin(), names.end(), name) != names.end()) name = input;
    names.push_back(name);
  }
  std::vector<std::vector<double>> times(tables.size());
  for (std::size_t sel = 0; sel < tables.size(); ++sel) {
    for (const auto& id : order) times[sel].push_back(std::min(tables[sel].at(id), o.timeout));
  }
  std::ostringstream csv;
  csv << "# timeout=" << format_number(o.timeout) << " instances=" << order.size() << '\n';
  csv << "delta,selector,borda\n";
  for (double delta : o.deltas) {
    const auto scores = borda_table(times, o.timeout, delta);
    for (std::size_t sel = 0; sel < names.size(); ++sel) {
      csv << format_number(delta) << ',' << names[sel] << ',' << format_number(scores[sel]) << '\n';
    }
  }
  if (o.output.empty()) {
    out << csv.str();
  } else {
    write_file(o.output, csv.str());
  }
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const Scenario s = generate_synthetic_scenario(o.synth);
  const fs::path dir = o.output.empty() ? fs::path(s.name()) : fs::path(o.output);
  save_scenario(s, dir);
  out << "scenario: " << s.name() << '\n'
      << "instances: " << s.num_instances() << '\n'
      << "algorithms: " << s.num_algorithms() << '\n'
      << "features: " << s.num_features() << '\n'
      << "written to: " << dir.string() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"sunny-as2: k-NN based algorithm scheduling for ASlib scenarios", "sunny-as2"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-v,--verbose", o.verbose, "Log progress to stderr");
  app.add_flag("-q,--quiet", o.quiet, "Only log errors");

  auto* train = app.add_subcommand("train", "Learn a model on a scenario");
  train->add_option("--scenario", o.scenario_dir, "ASlib scenario directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("-o,--output", o.output, "Model file (default model.json)");
  train->add_option("--instances", o.instances_file, "File listing training instance ids (default: all)");
  add_config_options(train, o);

  auto* predict = app.add_subcommand("predict", "Print schedules as newline-delimited JSON");
  predict->add_option("--scenario", o.scenario_dir, "ASlib scenario directory")->required()->check(CLI::ExistingDirectory);
  predict->add_option("--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--instance", o.instance_ids, "Instance id (repeatable)");
  predict->add_option("--instances", o.instances_file, "File listing instance ids");
  predict->add_flag("--all", o.all_instances, "Every instance of the scenario");
  predict->add_option("-o,--output", o.output, "Output file (default: standard output)");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on held-out instances");
  evaluate->add_option("--scenario", o.scenario_dir, "ASlib scenario directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--instances", o.instances_file, "File listing test instance ids (default: all not trained on)");
  evaluate->add_option("-o,--output", o.output, "Output directory (default evaluation)");
  add_config_options(evaluate, o);

  auto* cv = app.add_subcommand("cv", "Repeated nested cross-validation");
  cv->add_option("--scenario", o.scenario_dir, "ASlib scenario directory")->required()->check(CLI::ExistingDirectory);
  cv->add_option("-o,--output", o.output, "Output directory (default cv)");
  add_config_options(cv, o);

  auto* analyze = app.add_subcommand("analyze", "Cross-validation plus neighborhood, failure and schedule diagnostics");
  analyze->add_option("--scenario", o.scenario_dir, "ASlib scenario directory")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("-o,--output", o.output, "Output directory (default analysis)");
  add_config_options(analyze, o);

  auto* compare = app.add_subcommand("compare", "Borda scoreboard over per-instance time files");
  compare->add_option("inputs", o.inputs, "CSV files with instance_id,seconds")->required()->check(CLI::ExistingFile);
  compare->add_option("--timeout", o.timeout, "Timeout in seconds")->required();
  compare->add_option("--delta", o.deltas, "Tolerance values (comma separated)")->delimiter(',');
  compare->add_option("-o,--output", o.output, "Output file (default: standard output)");

  auto* synth = app.add_subcommand("synth", "Write a planted-cluster scenario");
  synth->add_option("-o,--output", o.output, "Scenario directory (default synthetic-<seed>)");
  synth->add_option("--instances", o.synth.n_instances, "Number of instances")->check(CLI::PositiveNumber);
  synth->add_option("--algorithms", o.synth.n_algorithms, "Number of algorithms")->check(CLI::Range(2, 1000));
  synth->add_option("--informative", o.synth.n_informative, "Informative features");
  synth->add_option("--noise", o.synth.n_noise, "Noise features");
  synth->add_option("--timeout", o.synth.timeout, "Timeout in seconds")->check(CLI::PositiveNumber);
  synth->add_option("--dominance", o.synth.dominance, "Probability the cluster solver succeeds")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--other-timeout", o.synth.other_timeout, "Probability other solvers time out")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--unsolvable", o.synth.unsolvable_fraction, "Fraction of unsolvable instances")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--spread", o.synth.cluster_spread, "Cluster standard deviation")->check(CLI::NonNegativeNumber);
  synth->add_option("--noise-groups", o.synth.noise_groups, "Decoy groups for noise features, 0 = uniform noise");
  synth->add_flag("--feature-costs", o.synth.feature_costs, "Write feature_costs.arff");
  synth->add_option("--seed", o.synth.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  set_log_sink([&err](LogLevel level, std::string_view msg) {
    err << (level == LogLevel::warning ? "warning: " : "") << msg << '\n';
  });
  set_log_threshold(o.verbose ? LogLevel::info : LogLevel::warning);
  if (o.quiet) set_log_sink({});

  try {
    if (*train) return cmd_train(o, out);
    if (*predict) return cmd_predict(o, out);
    if (*evaluate) return cmd_evaluate(o, out);
    if (*cv) return cmd_cv(o, out);
    if (*analyze) return cmd_analyze(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*synth) return cmd_synth(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace sunny::cli
