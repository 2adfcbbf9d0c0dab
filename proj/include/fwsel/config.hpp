#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fwsel/dataset.hpp"
#include "fwsel/featsel.hpp"
#include "fwsel/ippg.hpp"

namespace fwsel {

/// Every tunable of an experiment. The text form is one `key = value` per
/// line; see docs/config.md for the key list.
struct ExperimentConfig {
  std::string data_path;  // empty: generate the synthetic benchmark per seed
  SynthSpec synth;        // synth.seed is replaced by the run seed
  SelectionConfig select = default_selection();
  std::size_t skb_k = 0;  // 0: use the lambda floor
  double pca_threshold = 0.95;

  std::string bench_function = "sphere";
  std::size_t bench_dimension = 10;
  std::size_t bench_max_evaluations = 20000;
  std::vector<std::string> bench_algorithms{"ifa", "fa"};

  PulseVideoSpec video;
  std::string ippg_fore;
  std::string ippg_nose;

  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  static SelectionConfig default_selection();
};

// Parses the text form. Unknown keys, type mismatches and constraint
// violations raise ConfigError naming the key (and line, when parsing).
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Sets one key from its text value, as if it appeared in a config file.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Canonical text: every key in documentation order, reals in shortest round-trip form.
std::string serialize_config(const ExperimentConfig& cfg);

// Typed echo used inside reports.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

void validate_config(const ExperimentConfig& cfg);

struct ConfigKeyInfo {
  std::string key;
  std::string type;
  std::string description;
};
std::vector<ConfigKeyInfo> config_keys();

}  // namespace fwsel
