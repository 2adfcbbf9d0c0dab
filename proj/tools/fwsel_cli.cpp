// Command-line front end over the C API in libfwsel.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fwsel/fwsel.h"

namespace {

int report_error(fwsel_status st) {
  std::fprintf(stderr, "fwsel: %s\n", fwsel_last_error());
  return static_cast<int>(st);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Options {
  std::string config;
  std::string out;
  std::string seeds;
  unsigned threads = 1;
  std::vector<std::string> sets;
};

int build_config(const Options& o, fwsel_config** cfg) {
  fwsel_status st = o.config.empty() ? fwsel_config_default(cfg) : fwsel_config_load(o.config.c_str(), cfg);
  if (st != FWSEL_OK) return report_error(st);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "fwsel: --set expects key=value, got '%s'\n", kv.c_str());
      return FWSEL_ERR_CONFIG;
    }
    st = fwsel_config_set(*cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != FWSEL_OK) return report_error(st);
  }
  if (!o.seeds.empty() && (st = fwsel_config_set(*cfg, "run.seeds", o.seeds.c_str())) != FWSEL_OK)
    return report_error(st);
  if ((st = fwsel_config_validate(*cfg)) != FWSEL_OK) return report_error(st);
  return 0;
}

std::string out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("FWSEL_OUT_DIR"); env && *env) return env;
  return "out";
}

int write(const std::string& path, const std::string& text) {
  const fwsel_status st = fwsel_write_file_atomic(path.c_str(), text.data(), text.size());
  return st == FWSEL_OK ? 0 : report_error(st);
}

int run(const Options& o, const std::string& command, const std::string& sub) {
  fwsel_config* cfg = nullptr;
  if (int rc = build_config(o, &cfg)) {
    fwsel_config_free(cfg);
    return rc;
  }
  const std::string dir = out_dir(o);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    fwsel_config_free(cfg);
    std::fprintf(stderr, "fwsel: %s: %s\n", dir.c_str(), ec.message().c_str());
    return FWSEL_ERR_DATA;
  }
  fwsel_report* rep = nullptr;
  const fwsel_status st = fwsel_run(cfg, command.c_str(), sub.c_str(), dir.c_str(), o.threads, &rep);
  fwsel_config_free(cfg);
  if (st != FWSEL_OK) return report_error(st);

  const std::string stem = (std::filesystem::path(dir) / (sub.empty() ? command : command + "_" + sub)).string();
  int rc = write(stem + ".json", fwsel_report_json(rep));
  if (!rc) rc = write(stem + ".txt", fwsel_report_text(rep));
  if (!rc) std::cout << fwsel_report_text(rep) << "report: " << stem << ".json\n";
  fwsel_report_free(rep);
  return rc;
}

int compare(const std::vector<std::string>& files, std::size_t reference, const std::string& out) {
  std::vector<std::string> texts;
  for (const auto& f : files) {
    texts.push_back(read_text(f));
    if (texts.back().empty()) {
      std::fprintf(stderr, "fwsel: %s: cannot read report\n", f.c_str());
      return FWSEL_ERR_DATA;
    }
  }
  std::vector<const char*> ptrs;
  for (const auto& t : texts) ptrs.push_back(t.c_str());
  char* table = nullptr;
  const fwsel_status st = fwsel_compare(ptrs.data(), ptrs.size(), reference, &table);
  if (st != FWSEL_OK) return report_error(st);
  std::string text = table;
  fwsel_string_free(table);
  std::cout << text;
  return out.empty() ? 0 : write(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wrapper feature selection with fireworks, PSO and bat optimizers"};
  app.set_version_flag("--version", std::string(fwsel_version()));
  app.require_subcommand(1);

  Options o;
  app.add_option("--config", o.config, "config file (key = value lines)");
  app.add_option("--out", o.out, "output directory (default $FWSEL_OUT_DIR, then ./out)");
  app.add_option("--seeds", o.seeds, "comma-separated seeds, overrides run.seeds");
  app.add_option("--threads", o.threads, "evaluation worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--set", o.sets, "override one key, key=value (repeatable)");

  std::string sub;
  auto* select = app.add_subcommand("select", "search feature subsets with swarm.algorithm");
  auto* baseline = app.add_subcommand("baseline", "score a baseline selector");
  baseline->add_option("method", sub, "fa, pso, ba, skb, all or pca")
      ->required()
      ->check(CLI::IsMember({"fa", "pso", "ba", "skb", "all", "pca"}));
  auto* bench = app.add_subcommand("bench", "optimizer benchmark on a test function");
  bench->add_option("function", sub, "sphere, rastrigin or rastrigin-centered (default bench.function)")
      ->check(CLI::IsMember({"sphere", "rastrigin", "rastrigin-centered"}));
  auto* synth = app.add_subcommand("synth", "write synthetic datasets or pulse videos");
  synth->add_option("target", sub, "dataset or video")->check(CLI::IsMember({"dataset", "video"}));
  auto* ippg = app.add_subcommand("ippg", "extract iPPG features from frame files or synthetic video");
  auto* importance = app.add_subcommand("importance", "rank features by selection frequency");

  std::vector<std::string> files;
  std::size_t reference = 1;
  std::string compare_out;
  auto* cmp = app.add_subcommand("compare", "tabulate Avg and dAvg across reports");
  cmp->add_option("reports", files, "report JSON files")->required()->check(CLI::ExistingFile);
  cmp->add_option("--reference", reference, "1-based index of the reference report")->check(CLI::PositiveNumber);
  cmp->add_option("-o,--output", compare_out, "also write the table here");

  auto* show = app.add_subcommand("config", "print the effective config");
  auto* keys = app.add_subcommand("keys", "list config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : FWSEL_ERR_CONFIG;
  }

  if (*select) return run(o, "select", "");
  if (*baseline) return run(o, "baseline", sub);
  if (*bench) return run(o, "bench", sub);
  if (*synth) return run(o, "synth", sub);
  if (*ippg) return run(o, "ippg", "");
  if (*importance) return run(o, "importance", "");
  if (*cmp) return compare(files, reference - 1, compare_out);
  if (*show) {
    fwsel_config* cfg = nullptr;
    int rc = build_config(o, &cfg);
    char* text = nullptr;
    if (!rc) {
      const fwsel_status st = fwsel_config_serialize(cfg, &text);
      rc = st == FWSEL_OK ? 0 : report_error(st);
    }
    if (text) std::cout << text;
    fwsel_string_free(text);
    fwsel_config_free(cfg);
    return rc;
  }
  if (*keys) {
    char* text = nullptr;
    const fwsel_status st = fwsel_config_keys(&text);
    if (st != FWSEL_OK) return report_error(st);
    std::cout << text;
    fwsel_string_free(text);
    return 0;
  }
  return FWSEL_ERR_CONFIG;
}
