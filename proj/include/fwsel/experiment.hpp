#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fwsel/config.hpp"

namespace fwsel {

inline constexpr int kReportSchemaVersion = 1;

struct RunOptions {
  std::filesystem::path out_dir;  // synth writes its files here; empty means the working directory
  unsigned threads = 1;
};

struct Report {
  nlohmann::json json;
  std::string text;  // aligned plain-text summary, no timing
};

// command: select, baseline, bench, synth, ippg, importance.
// sub: baseline {fa,pso,ba,skb,all,pca}; bench {sphere,rastrigin,rastrigin-centered};
// synth {dataset,video}. Empty sub picks the config default where one exists.
Report run_experiment(const ExperimentConfig& cfg, const std::string& command, const std::string& sub,
                      const RunOptions& opts = {});

// Avg(%) and dAvg(%) per report against reports[reference]; reference row first,
// the rest in input order. Throws ConfigError when the reports disagree on data,
// synthetic generator, split protocol or seeds.
std::string compare_table(const std::vector<nlohmann::json>& reports, std::size_t reference = 0);

// Pretty JSON with a trailing newline.
std::string report_to_string(const nlohmann::json& report);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace fwsel
