#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "sunny/training.hpp"

namespace sunny::cli {

// key -> raw value, keys named after TrainingConfig fields.
using Settings = std::map<std::string, std::string>;

// Flat `key = value` lines; '#' starts a comment. Throws ConfigError.
Settings read_config_file(const std::filesystem::path& path);
Settings parse_config_text(const std::string& text, const std::string& origin);

// SUNNY_AS2_<KEY> for every known key that is set.
Settings environment_settings();

// Later layers win.
void merge_into(Settings& base, const Settings& layer);

// Throws ConfigError on unknown keys or unparsable values.
TrainingConfig make_config(const Settings& settings);

bool is_known_key(const std::string& key);

}  // namespace sunny::cli
