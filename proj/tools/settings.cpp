#include "settings.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sunny/error.hpp"

namespace sunny::cli {
namespace {

constexpr std::array<const char*, 16> kKeys = {
    "split_mode",  "instance_limit",      "feature_limit", "k_max",       "schedule_limit", "seed",
    "time_cap",    "learning_mode",       "engine_train",  "engine_test", "charge_feature_cost",
    "par_penalty", "outer_folds",         "inner_folds",   "repetitions", "jobs"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename F>
auto parse_enum(const std::string& key, const std::string& v, F parse) {
  try {
    return parse(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": unknown value '" + v + "'");
  }
}

}  // namespace

bool is_known_key(const std::string& key) {
  return std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) { return key == k; }) != kKeys.end();
}

Settings parse_config_text(const std::string& text, const std::string& origin) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    if (!is_known_key(key)) throw ConfigError(origin + ":" + std::to_string(number) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

Settings environment_settings() {
  Settings out;
  for (const char* key : kKeys) {
    std::string name = "SUNNY_AS2_";
    for (const char* c = key; *c; ++c) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    if (const char* v = std::getenv(name.c_str())) out[key] = trim(v);
  }
  return out;
}

void merge_into(Settings& base, const Settings& layer) {
  for (const auto& [k, v] : layer) base[k] = v;
}

TrainingConfig make_config(const Settings& settings) {
  TrainingConfig c;
  for (const auto& [key, v] : settings) {
    if (key == "split_mode") {
      c.split_mode = parse_enum(key, v, [](const std::string& s) { return parse_split_mode(s); });
    } else if (key == "instance_limit") {
      c.instance_limit = to_count(key, v);
    } else if (key == "feature_limit") {
      c.feature_limit = to_count(key, v);
    } else if (key == "k_max") {
      c.k_max = to_count(key, v);
    } else if (key == "schedule_limit") {
      c.schedule_limit = to_count(key, v);
    } else if (key == "seed") {
      c.seed = to_u64(key, v);
    } else if (key == "time_cap") {
      c.time_cap_seconds = to_double(key, v);
    } else if (key == "learning_mode") {
      c.learning_mode = parse_enum(key, v, [](const std::string& s) { return parse_learning_mode(s); });
    } else if (key == "engine_train") {
      c.engine_train = parse_enum(key, v, [](const std::string& s) { return parse_engine(s); });
    } else if (key == "engine_test") {
      c.engine_test = parse_enum(key, v, [](const std::string& s) { return parse_engine(s); });
    } else if (key == "charge_feature_cost") {
      c.charge_feature_cost = to_bool(key, v);
    } else if (key == "par_penalty") {
      c.par_penalty = to_double(key, v);
    } else if (key == "outer_folds") {
      c.outer_folds = to_count(key, v);
    } else if (key == "inner_folds") {
      c.inner_folds = to_count(key, v);
    } else if (key == "repetitions") {
      c.repetitions = to_count(key, v);
    } else if (key == "jobs") {
      c.jobs = to_count(key, v);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (c.instance_limit == 0) throw ConfigError("instance_limit must be positive");
  if (c.feature_limit == 0) throw ConfigError("feature_limit must be positive");
  if (c.k_max == 0) throw ConfigError("k_max must be positive");
  if (c.schedule_limit == 0) throw ConfigError("schedule_limit must be positive");
  if (c.outer_folds < 2) throw ConfigError("outer_folds must be at least 2");
  if (c.inner_folds < 2) throw ConfigError("inner_folds must be at least 2");
  if (c.repetitions == 0) throw ConfigError("repetitions must be positive");
  if (!(c.time_cap_seconds > 0)) throw ConfigError("time_cap must be positive");
  if (!(c.par_penalty >= 1)) throw ConfigError("par_penalty must be at least 1");
  return c;
}

}  // namespace sunny::cli
