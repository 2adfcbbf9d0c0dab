#include "fwsel/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fwsel {

namespace {

using Json = nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Shortest text that parses back to the same double.
std::string format_real(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(std::string(key) + ": expected a real number, got '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Entry {
  std::string key;
  std::string type;
  std::string description;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> text;
  std::function<Json(const ExperimentConfig&)> json;
};

template <class Access>
Entry uint_key(std::string key, std::string description, Access access) {
  return {key, "integer", std::move(description),
          [access, key](ExperimentConfig& c, std::string_view v) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(parse_uint(key, v));
          },
          [access](const ExperimentConfig& c) { return std::to_string(access(const_cast<ExperimentConfig&>(c))); },
          [access](const ExperimentConfig& c) { return Json(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Access>
Entry real_key(std::string key, std::string description, Access access) {
  return {key, "real", std::move(description),
          [access, key](ExperimentConfig& c, std::string_view v) { access(c) = parse_real(key, v); },
          [access](const ExperimentConfig& c) { return format_real(access(const_cast<ExperimentConfig&>(c))); },
          [access](const ExperimentConfig& c) { return Json(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Access>
Entry string_key(std::string key, std::string description, Access access) {
  return {key, "string", std::move(description),
          [access](ExperimentConfig& c, std::string_view v) { access(c) = std::string(trim(v)); },
          [access](const ExperimentConfig& c) { return access(const_cast<ExperimentConfig&>(c)); },
          [access](const ExperimentConfig& c) { return Json(access(const_cast<ExperimentConfig&>(c))); }};
}

const std::vector<Entry>& schema() {
  using C = ExperimentConfig;
  static const std::vector<Entry> entries = {
      string_key("data.path", "CSV dataset; empty generates the synthetic benchmark per seed",
                 [](C& c) -> auto& { return c.data_path; }),
      uint_key("synth.n_samples", "synthetic rows", [](C& c) -> auto& { return c.synth.n_samples; }),
      uint_key("synth.informative", "synthetic informative columns", [](C& c) -> auto& { return c.synth.d_informative; }),
      uint_key("synth.noise", "synthetic label-independent columns", [](C& c) -> auto& { return c.synth.d_noise; }),
      real_key("synth.imbalance", "fraction of positive labels", [](C& c) -> auto& { return c.synth.class_imbalance; }),
      real_key("synth.noise_sigma", "std of the noise on informative columns",
               [](C& c) -> auto& { return c.synth.noise_sigma; }),
      real_key("split.test_fraction", "stratified test share", [](C& c) -> auto& { return c.select.test_fraction; }),
      uint_key("split.repeats", "splits averaged per fitness evaluation",
               [](C& c) -> auto& { return c.select.split_repeats; }),
      real_key("split.holdout_fraction", "untouched holdout share (0 disables)",
               [](C& c) -> auto& { return c.select.holdout_fraction; }),
      real_key("select.lambda_fraction", "minimum selected share of features",
               [](C& c) -> auto& { return c.select.lambda_fraction; }),
      uint_key("adaboost.rounds", "boosting rounds", [](C& c) -> auto& { return c.select.rounds; }),
      Entry{"swarm.algorithm", "string", "ifa, fa, pso or ba",
            [](C& c, std::string_view v) {
              try {
                c.select.swarm.algorithm = algorithm_from_string(std::string(trim(v)));
              } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("swarm.algorithm: ") + e.what());
              }
            },
            [](const C& c) { return to_string(c.select.swarm.algorithm); },
            [](const C& c) { return Json(to_string(c.select.swarm.algorithm)); }},
      uint_key("swarm.population", "fireworks / particles / bats", [](C& c) -> auto& { return c.select.swarm.population; }),
      uint_key("swarm.s_max", "maximum sparks per firework", [](C& c) -> auto& { return c.select.swarm.s_max; }),
      uint_key("swarm.s_min", "minimum sparks per firework", [](C& c) -> auto& { return c.select.swarm.s_min; }),
      real_key("swarm.r_max", "maximum explosion radius", [](C& c) -> auto& { return c.select.swarm.r_max; }),
      real_key("swarm.epsilon", "smoothing constant in spark and radius shares",
               [](C& c) -> auto& { return c.select.swarm.epsilon; }),
      uint_key("swarm.gaussian_sparks", "mutation sparks per generation",
               [](C& c) -> auto& { return c.select.swarm.gaussian_sparks; }),
      uint_key("swarm.max_evaluations", "fitness evaluation budget for select/baseline",
               [](C& c) -> auto& { return c.select.swarm.max_evaluations; }),
      uint_key("swarm.max_generations", "generation cap (0: none)",
               [](C& c) -> auto& { return c.select.swarm.max_generations; }),
      real_key("pso.inertia", "PSO inertia weight", [](C& c) -> auto& { return c.select.swarm.pso.inertia; }),
      real_key("pso.cognitive", "PSO cognitive coefficient", [](C& c) -> auto& { return c.select.swarm.pso.cognitive; }),
      real_key("pso.social", "PSO social coefficient", [](C& c) -> auto& { return c.select.swarm.pso.social; }),
      real_key("pso.velocity_clamp", "PSO velocity limit", [](C& c) -> auto& { return c.select.swarm.pso.velocity_clamp; }),
      real_key("bat.f_min", "bat minimum frequency", [](C& c) -> auto& { return c.select.swarm.bat.f_min; }),
      real_key("bat.f_max", "bat maximum frequency", [](C& c) -> auto& { return c.select.swarm.bat.f_max; }),
      real_key("bat.loudness", "initial loudness", [](C& c) -> auto& { return c.select.swarm.bat.loudness; }),
      real_key("bat.loudness_decay", "loudness multiplier on acceptance",
               [](C& c) -> auto& { return c.select.swarm.bat.loudness_decay; }),
      real_key("bat.pulse_rate", "asymptotic pulse rate", [](C& c) -> auto& { return c.select.swarm.bat.pulse_rate; }),
      real_key("bat.pulse_gamma", "pulse rate growth constant", [](C& c) -> auto& { return c.select.swarm.bat.pulse_gamma; }),
      real_key("bat.walk_scale", "local random walk step", [](C& c) -> auto& { return c.select.swarm.bat.walk_scale; }),
      uint_key("skb.k", "features kept by the ANOVA filter (0: lambda floor)", [](C& c) -> auto& { return c.skb_k; }),
      real_key("pca.variance_threshold", "explained variance kept by PCA", [](C& c) -> auto& { return c.pca_threshold; }),
      string_key("bench.function", "sphere, rastrigin or rastrigin-centered",
                 [](C& c) -> auto& { return c.bench_function; }),
      uint_key("bench.dimension", "benchmark dimension", [](C& c) -> auto& { return c.bench_dimension; }),
      uint_key("bench.max_evaluations", "benchmark evaluation budget", [](C& c) -> auto& { return c.bench_max_evaluations; }),
      Entry{"bench.algorithms", "list", "comma-separated optimizers to benchmark",
            [](C& c, std::string_view v) {
              c.bench_algorithms.clear();
              for (auto item : split_list(v)) {
                try {
                  algorithm_from_string(std::string(item));
                } catch (const std::invalid_argument& e) {
                  throw ConfigError(std::string("bench.algorithms: ") + e.what());
                }
                c.bench_algorithms.emplace_back(item);
              }
            },
            [](const C& c) {
              std::string out;
              for (const auto& a : c.bench_algorithms) out += (out.empty() ? "" : ",") + a;
              return out;
            },
            [](const C& c) { return Json(c.bench_algorithms); }},
      real_key("video.seconds", "synthetic video duration", [](C& c) -> auto& { return c.video.seconds; }),
      uint_key("video.fps", "synthetic video frame rate", [](C& c) -> auto& { return c.video.fps; }),
      uint_key("video.height", "synthetic ROI height", [](C& c) -> auto& { return c.video.height; }),
      uint_key("video.width", "synthetic ROI width", [](C& c) -> auto& { return c.video.width; }),
      real_key("video.heart_hz", "injected pulse frequency", [](C& c) -> auto& { return c.video.heart_hz; }),
      real_key("video.breath_hz", "injected respiration frequency", [](C& c) -> auto& { return c.video.breath_hz; }),
      real_key("video.heart_amplitude", "pulse amplitude (intensity levels)",
               [](C& c) -> auto& { return c.video.heart_amplitude; }),
      real_key("video.breath_amplitude", "respiration amplitude (intensity levels)",
               [](C& c) -> auto& { return c.video.breath_amplitude; }),
      real_key("video.snr_db", "signal-to-noise ratio of the channel mean", [](C& c) -> auto& { return c.video.snr_db; }),
      string_key("ippg.fore", "forehead ROI frame file", [](C& c) -> auto& { return c.ippg_fore; }),
      string_key("ippg.nose", "nose ROI frame file", [](C& c) -> auto& { return c.ippg_nose; }),
      Entry{"run.seeds", "list", "comma-separated seeds; every command runs once per seed",
            [](C& c, std::string_view v) {
              c.seeds.clear();
              for (auto item : split_list(v)) c.seeds.push_back(parse_uint("run.seeds", item));
            },
            [](const C& c) {
              std::string out;
              for (auto s : c.seeds) out += (out.empty() ? "" : ",") + std::to_string(s);
              return out;
            },
            [](const C& c) { return Json(c.seeds); }},
  };
  return entries;
}

const Entry& find_entry(std::string_view key) {
  for (const auto& e : schema())
    if (e.key == key) return e;
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

}  // namespace

SelectionConfig ExperimentConfig::default_selection() {
  SelectionConfig s;
  s.swarm.max_evaluations = 3000;
  return s;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(trim(key)).set(cfg, value);
}

void validate_config(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  const auto& s = c.select;
  const auto& w = s.swarm;
  require(c.synth.n_samples >= 4, "synth.n_samples: must be >= 4");
  require(c.synth.d_informative >= 1, "synth.informative: must be >= 1");
  require(c.synth.class_imbalance > 0.0 && c.synth.class_imbalance < 1.0, "synth.imbalance: must be in (0, 1)");
  require(c.synth.noise_sigma >= 0.0, "synth.noise_sigma: must be >= 0");
  require(s.test_fraction > 0.0 && s.test_fraction < 1.0, "split.test_fraction: must be in (0, 1)");
  require(s.split_repeats >= 1, "split.repeats: must be >= 1");
  require(s.holdout_fraction >= 0.0 && s.holdout_fraction < 1.0, "split.holdout_fraction: must be in [0, 1)");
  require(s.lambda_fraction > 0.0 && s.lambda_fraction < 1.0, "select.lambda_fraction: must be in (0, 1)");
  require(s.rounds >= 1, "adaboost.rounds: must be >= 1");
  require(w.population >= 2, "swarm.population: must be >= 2");
  require(w.s_min >= 1, "swarm.s_min: must be >= 1");
  require(w.s_max >= w.s_min, "swarm.s_max: must be >= swarm.s_min");
  require(w.r_max > 0.0 && w.r_max <= 1.0, "swarm.r_max: must be in (0, 1]");
  require(w.epsilon > 0.0, "swarm.epsilon: must be > 0");
  require(w.max_evaluations >= 1, "swarm.max_evaluations: must be >= 1");
  require(w.pso.velocity_clamp > 0.0, "pso.velocity_clamp: must be > 0");
  require(w.bat.f_max >= w.bat.f_min, "bat.f_max: must be >= bat.f_min");
  require(w.bat.loudness_decay > 0.0 && w.bat.loudness_decay <= 1.0, "bat.loudness_decay: must be in (0, 1]");
  require(c.pca_threshold > 0.0 && c.pca_threshold <= 1.0, "pca.variance_threshold: must be in (0, 1]");
  require(c.bench_function == "sphere" || c.bench_function == "rastrigin" || c.bench_function == "rastrigin-centered",
          "bench.function: expected sphere, rastrigin or rastrigin-centered");
  require(c.bench_dimension >= 1, "bench.dimension: must be >= 1");
  require(c.bench_max_evaluations >= 1, "bench.max_evaluations: must be >= 1");
  require(!c.bench_algorithms.empty(), "bench.algorithms: must name at least one optimizer");
  require(c.video.seconds >= 2.0, "video.seconds: must be >= 2");
  require(c.video.fps >= 1 && c.video.fps <= 255, "video.fps: must be in [1, 255]");
  require(c.video.height >= 1 && c.video.width >= 1, "video.height/video.width: must be >= 1");
  require(c.video.heart_hz > 0.0 && c.video.breath_hz > 0.0, "video.heart_hz/video.breath_hz: must be > 0");
  require(!c.seeds.empty(), "run.seeds: must list at least one seed");
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t, std::less<>> key_line;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected `key = value`");
    const auto key = trim(line.substr(0, eq));
    try {
      set_config_value(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    key_line[std::string(key)] = line_no;
  }
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    // point at the line that set the offending key, if the file set it
    const std::string msg = e.what();
    const auto it = key_line.find(std::string_view(msg).substr(0, msg.find(':')));
    if (it == key_line.end()) throw ConfigError(origin + ": " + msg);
    throw ConfigError(origin + ":" + std::to_string(it->second) + ": " + msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& e : schema()) out += e.key + " = " + e.text(cfg) + "\n";
  return out;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  Json out = Json::object();
  for (const auto& e : schema()) out[e.key] = e.json(cfg);
  return out;
}

std::vector<ConfigKeyInfo> config_keys() {
  std::vector<ConfigKeyInfo> out;
  for (const auto& e : schema()) out.push_back({e.key, e.type, e.description});
  return out;
}

}  // namespace fwsel
