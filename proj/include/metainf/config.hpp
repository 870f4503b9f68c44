#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metainf/harness.hpp"

namespace metainf {

// Scalar or array value of the experiment file. The file uses the TOML subset
// [section] headers, key = value lines, # comments, strings, integers,
// floats, booleans and one-level arrays.
struct ConfigValue {
  enum class Kind { kString, kInteger, kFloat, kBool, kArray };
  Kind kind = Kind::kString;
  std::string text;  // string payload
  std::int64_t integer = 0;
  double number = 0.0;  // also set for integers
  bool boolean = false;
  std::vector<ConfigValue> items;
};

// Keys are "section.key".
using ConfigTable = std::map<std::string, ConfigValue>;

// `source` is used in error messages. Throws ConfigError.
ConfigTable parse_config_text(std::string_view text, std::string_view source = "config");
ConfigValue parse_config_value(std::string_view text, const std::string& key);

// KEY=VALUE on top of a table. KEY may omit the section when the bare name is
// unique. Array keys accept a comma list without brackets (seeds=1,2,3) and
// string keys accept an unquoted word.
void apply_override(ConfigTable& table, std::string_view assignment);

// Unknown keys and wrongly typed values throw ConfigError naming the key.
ExperimentConfig config_from_table(const ConfigTable& table);

// Reads `path` (missing file: ConfigError whose message contains the path),
// applies the overrides, then MB_SEED if set.
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::span<const std::string> overrides = {});

// Full configuration, defaults included, in the same file format.
std::string dump_config(const ExperimentConfig& config);

}  // namespace metainf
