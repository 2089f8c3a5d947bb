#ifndef PATCHFORGE_CONFIG_HPP
#define PATCHFORGE_CONFIG_HPP

#include "patchforge/attack.hpp"
#include "patchforge/oracle.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace patchforge {

/// One value of a TOML-style config file: bare number or boolean, quoted
/// string, or a flat array of numbers.
struct ConfigValue {
  enum class Kind { Bool, Number, String, Array };
  Kind kind = Kind::Number;
  std::string text;  // number token or unquoted string
  bool boolean = false;
  double number = 0.0;
  std::vector<double> array;
};

/// Keys are "section.key" ("key" for the top level).
using ConfigTable = std::map<std::string, ConfigValue>;

/// Parses `[section]` headers, `key = value` lines and `#` comments.
ConfigTable parse_config_text(const std::string& text);

struct OracleSettings {
  std::string kind = "toy";  // toy | remote
  std::string endpoint;
  int max_attempts = 3;
  double timeout_s = 60.0;
  ToyInfraredParams toy_infrared;
  ToyVisibleParams toy_visible;
};

struct DatasetSettings {
  std::filesystem::path annotations;
  std::filesystem::path image_root;  // empty: directory of the annotations file
};

struct RunConfig {
  AttackSettings attack;  // attack.seed is the global seed
  double delta = 0.5;
  OracleSettings oracle;
  DatasetSettings dataset;
  std::filesystem::path output_dir = "patchforge_out";
  int jobs = 1;

  void validate() const;
};

/// Builds a config from parsed text; unknown keys are errors. Relative
/// dataset paths resolve against `base_dir`.
RunConfig config_from_table(const ConfigTable& table, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse + config_from_table (paths written as given).
std::string to_config_text(const RunConfig& cfg);
nlohmann::json config_to_json(const RunConfig& cfg);

/// PATCHFORGE_ENDPOINT, when set, replaces oracle.endpoint.
void apply_environment(RunConfig& cfg);

}  // namespace patchforge

#endif  // PATCHFORGE_CONFIG_HPP
