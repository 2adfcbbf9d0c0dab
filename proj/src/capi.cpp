#include "fwsel/fwsel.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>

#include "fwsel/config.hpp"
#include "fwsel/dataset.hpp"
#include "fwsel/experiment.hpp"
#include "fwsel/metrics.hpp"

struct fwsel_config {
  fwsel::ExperimentConfig cfg;
};

struct fwsel_dataset {
  fwsel::Dataset ds;
};

struct fwsel_report {
  std::string json;
  std::string text;
};

namespace {

thread_local std::string last_error;

fwsel_status fail(fwsel_status code, const std::string& message) {
  last_error = message;
  return code;
}

// Maps the library's exception families onto status codes.
template <class Fn>
fwsel_status guard(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return FWSEL_OK;
  } catch (const fwsel::ConfigError& e) {
    return fail(FWSEL_ERR_CONFIG, e.what());
  } catch (const fwsel::DataError& e) {
    return fail(FWSEL_ERR_DATA, e.what());
  } catch (const fwsel::InvariantError& e) {
    return fail(FWSEL_ERR_INTERNAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(FWSEL_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(FWSEL_ERR_DATA, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FWSEL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FWSEL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FWSEL_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fwsel_version(void) { return FWSEL_VERSION; }

const char* fwsel_last_error(void) { return last_error.c_str(); }

void fwsel_string_free(char* s) { std::free(s); }

fwsel_status fwsel_config_default(fwsel_config** out) {
  if (!out) return fail(FWSEL_ERR_ARGUMENT, "out is null");
  return guard([&] { *out = new fwsel_config{}; });
}

fwsel_status fwsel_config_load(const char* path, fwsel_config** out) {
  if (!path || !out) return fail(FWSEL_ERR_ARGUMENT, "path or out is null");
  return guard([&] { *out = new fwsel_config{fwsel::load_config(path)}; });
}

fwsel_status fwsel_config_parse(const char* text, fwsel_config** out) {
  if (!text || !out) return fail(FWSEL_ERR_ARGUMENT, "text or out is null");
  return guard([&] { *out = new fwsel_config{fwsel::parse_config(text)}; });
}

fwsel_status fwsel_config_set(fwsel_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(FWSEL_ERR_ARGUMENT, "null argument");
  return guard([&] { fwsel::set_config_value(cfg->cfg, key, value); });
}

fwsel_status fwsel_config_validate(const fwsel_config* cfg) {
  if (!cfg) return fail(FWSEL_ERR_ARGUMENT, "cfg is null");
  return guard([&] { fwsel::validate_config(cfg->cfg); });
}

fwsel_status fwsel_config_serialize(const fwsel_config* cfg, char** out) {
  if (!cfg || !out) return fail(FWSEL_ERR_ARGUMENT, "cfg or out is null");
  return guard([&] { *out = dup(fwsel::serialize_config(cfg->cfg)); });
}

fwsel_status fwsel_config_keys(char** out) {
  if (!out) return fail(FWSEL_ERR_ARGUMENT, "out is null");
  return guard([&] {
    std::string text;
    for (const auto& k : fwsel::config_keys()) text += k.key + "\t" + k.type + "\t" + k.description + "\n";
    *out = dup(text);
  });
}

void fwsel_config_free(fwsel_config* cfg) { delete cfg; }

fwsel_status fwsel_dataset_load(const char* path, fwsel_dataset** out) {
  if (!path || !out) return fail(FWSEL_ERR_ARGUMENT, "path or out is null");
  return guard([&] { *out = new fwsel_dataset{fwsel::load_csv(path)}; });
}

fwsel_status fwsel_dataset_synthetic(const fwsel_config* cfg, uint64_t seed, fwsel_dataset** out) {
  if (!cfg || !out) return fail(FWSEL_ERR_ARGUMENT, "cfg or out is null");
  return guard([&] {
    auto spec = cfg->cfg.synth;
    spec.seed = seed;
    *out = new fwsel_dataset{fwsel::generate_synthetic(spec)};
  });
}

fwsel_status fwsel_dataset_save(const fwsel_dataset* ds, const char* path) {
  if (!ds || !path) return fail(FWSEL_ERR_ARGUMENT, "ds or path is null");
  return guard([&] { fwsel::write_file_atomic(path, fwsel::format_csv(ds->ds)); });
}

size_t fwsel_dataset_rows(const fwsel_dataset* ds) { return ds ? ds->ds.rows() : 0; }

size_t fwsel_dataset_dims(const fwsel_dataset* ds) { return ds ? ds->ds.dims() : 0; }

void fwsel_dataset_free(fwsel_dataset* ds) { delete ds; }

fwsel_status fwsel_metrics_evaluate(const int* labels, const int* predictions, const double* scores, size_t n,
                                    fwsel_metrics* out) {
  if (!labels || !predictions || !scores || !out) return fail(FWSEL_ERR_ARGUMENT, "null argument");
  return guard([&] {
    const auto m = fwsel::evaluate({labels, n}, {predictions, n}, {scores, n});
    *out = {m.auc, m.acc, m.pre, m.sen, m.f1, m.spe, fwsel::avg(m)};
  });
}

fwsel_status fwsel_run(const fwsel_config* cfg, const char* command, const char* sub, const char* out_dir,
                       unsigned threads, fwsel_report** out) {
  if (!cfg || !command || !out) return fail(FWSEL_ERR_ARGUMENT, "cfg, command or out is null");
  return guard([&] {
    fwsel::RunOptions opts;
    if (out_dir) opts.out_dir = out_dir;
    opts.threads = threads == 0 ? 1 : threads;
    auto rep = fwsel::run_experiment(cfg->cfg, command, sub ? sub : "", opts);
    *out = new fwsel_report{fwsel::report_to_string(rep.json), std::move(rep.text)};
  });
}

const char* fwsel_report_json(const fwsel_report* rep) { return rep ? rep->json.c_str() : ""; }

const char* fwsel_report_text(const fwsel_report* rep) { return rep ? rep->text.c_str() : ""; }

void fwsel_report_free(fwsel_report* rep) { delete rep; }

fwsel_status fwsel_compare(const char* const* report_json, size_t n, size_t reference, char** out) {
  if (!report_json || !out) return fail(FWSEL_ERR_ARGUMENT, "null argument");
  return guard([&] {
    std::vector<nlohmann::json> reports;
    for (size_t i = 0; i < n; ++i) {
      if (!report_json[i]) throw std::invalid_argument("compare: report " + std::to_string(i + 1) + " is null");
      try {
        reports.push_back(nlohmann::json::parse(report_json[i]));
      } catch (const nlohmann::json::parse_error& e) {
        throw fwsel::DataError("compare: report " + std::to_string(i + 1) + " is not valid JSON: " + e.what());
      }
    }
    *out = dup(fwsel::compare_table(reports, reference));
  });
}

fwsel_status fwsel_write_file_atomic(const char* path, const char* data, size_t size) {
  if (!path || (!data && size)) return fail(FWSEL_ERR_ARGUMENT, "null argument");
  return guard([&] { fwsel::write_file_atomic(path, std::string(data ? data : "", size)); });
}

}  // extern "C"
