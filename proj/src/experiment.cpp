#include "fwsel/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>

#include "fwsel/adaboost.hpp"
#include "fwsel/dataset.hpp"
#include "fwsel/featsel.hpp"
#include "fwsel/ippg.hpp"
#include "fwsel/metrics.hpp"
#include "fwsel/parallel.hpp"
#include "fwsel/pca.hpp"
#include "fwsel/rng.hpp"
#include "fwsel/swarm.hpp"

namespace fwsel {

namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

Json metrics_json(const MetricSet& m) {
  return {{"auc", m.auc}, {"acc", m.acc}, {"pre", m.pre}, {"sen", m.sen},
          {"f1", m.f1},   {"spe", m.spe}, {"avg", avg(m)}};
}

Json mask_json(const FeatureMask& mask) {
  Json out = Json::array();
  for (auto b : mask.bits) out.push_back(static_cast<int>(b));
  return out;
}

Json stumps_json(const AdaBoostModel& model) { return Json::parse(model_to_json(model)); }

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  std::optional<Dataset> loaded;

  Dataset dataset(std::uint64_t seed) const {
    if (loaded) return *loaded;
    SynthSpec spec = cfg.synth;
    spec.seed = seed;
    return generate_synthetic(spec);
  }

  SelectionConfig selection(std::uint64_t seed) const {
    SelectionConfig s = cfg.select;
    s.split_seed = seed;
    s.swarm.seed = seed;
    s.swarm.threads = opts.threads;
    return s;
  }
};

std::optional<double> recall(const Dataset& ds, const FeatureMask& mask) {
  if (ds.informative.size() != mask.size()) return std::nullopt;
  std::size_t total = 0, hit = 0;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (!ds.informative[j]) continue;
    ++total;
    hit += mask.bits[j];
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hit) / static_cast<double>(total);
}

Json selection_run(const Dataset& ds, const SelectionResult& r, std::uint64_t seed, double wall) {
  Json run = {{"seed", seed},
              {"algorithm", to_string(r.algorithm)},
              {"best_mask", mask_json(r.best_mask)},
              {"selected", r.best_mask.selected()},
              {"selected_count", r.best_mask.count()},
              {"metrics", metrics_json(r.best_metrics)},
              {"loss", r.loss},
              {"importance", r.importance},
              {"evaluations", r.evaluations},
              {"lambda", r.lambda},
              {"min_selected", r.min_selected},
              {"fitness_trace", r.fitness_trace},
              {"model", stumps_json(r.model)},
              {"wall_time_s", wall}};
  if (auto rc = recall(ds, r.best_mask)) run["recall"] = *rc;
  if (r.holdout_metrics) run["holdout_metrics"] = metrics_json(*r.holdout_metrics);
  return run;
}

Json selection_aggregate(const Json& runs) {
  std::vector<double> avgs, losses, recalls, holdout;
  for (const auto& run : runs) {
    avgs.push_back(run["metrics"]["avg"].get<double>());
    losses.push_back(run["loss"].get<double>());
    if (run.contains("recall")) recalls.push_back(run["recall"].get<double>());
    if (run.contains("holdout_metrics")) holdout.push_back(run["holdout_metrics"]["avg"].get<double>());
  }
  Json agg = {{"avg_median", median(avgs)}, {"loss_median", median(losses)}};
  if (!recalls.empty()) agg["recall_median"] = median(recalls);
  if (!holdout.empty()) agg["holdout_avg_median"] = median(holdout);
  return agg;
}

std::string selection_text(const std::string& title, const Json& runs, const Json& agg) {
  std::string out = title + "\n";
  out += "    seed  avg(%)     loss  selected  recall  evals\n";
  for (const auto& run : runs) {
    out += pad(std::to_string(run["seed"].get<std::uint64_t>()), 8);
    out += pad(fmt("%.2f", 100.0 * run["metrics"]["avg"].get<double>()), 8);
    out += pad(fmt("%.4f", run["loss"].get<double>()), 9);
    out += pad(std::to_string(run["selected_count"].get<std::size_t>()), 10);
    out += pad(run.contains("recall") ? fmt("%.2f", run["recall"].get<double>()) : "-", 8);
    out += pad(std::to_string(run["evaluations"].get<std::size_t>()), 7);
    out += "\n";
  }
  out += "  median avg(%) " + fmt("%.2f", 100.0 * agg["avg_median"].get<double>());
  out += "  loss " + fmt("%.4f", agg["loss_median"].get<double>());
  if (agg.contains("recall_median")) out += "  recall " + fmt("%.2f", agg["recall_median"].get<double>());
  out += "\n";
  return out;
}

// Metrics of AdaBoost trained on the leading principal components, averaged over the search splits.
SelectionResult pca_baseline(const Dataset& ds, const SelectionConfig& sel, double threshold, std::size_t& k_out,
                             double& ratio_out) {
  auto splits = make_selection_splits(ds, sel);
  MetricSet mean;
  for (auto& split : splits.search) {
    standardize(split);
    const auto model = fit_pca(split.train.features, threshold);
    k_out = model.k;
    ratio_out = model.explained_ratio();
    const auto train = transform(model, split.train.features);
    const auto test = transform(model, split.test.features);
    const auto boost = train_adaboost(train, split.train.labels, sel.rounds);
    const auto scores = decision_scores(boost, test);
    const auto preds = predict(boost, test);
    const auto m = evaluate(split.test.labels, preds, scores);
    mean.auc += m.auc;
    mean.acc += m.acc;
    mean.pre += m.pre;
    mean.sen += m.sen;
    mean.f1 += m.f1;
    mean.spe += m.spe;
  }
  const auto n = static_cast<double>(splits.search.size());
  for (double* f : {&mean.auc, &mean.acc, &mean.pre, &mean.sen, &mean.f1, &mean.spe}) *f /= n;
  SelectionResult r;
  r.best_mask = FeatureMask::all(ds.dims());
  r.best_metrics = mean;
  r.loss = -mean.sum();
  r.evaluations = 1;
  r.min_selected = ds.dims();
  r.importance.assign(ds.dims(), 1);
  return r;
}

Report run_selection(const Context& ctx, const std::string& method) {
  Json runs = Json::array();
  for (auto seed : ctx.cfg.seeds) {
    const auto start = Clock::now();
    const Dataset ds = ctx.dataset(seed);
    auto sel = ctx.selection(seed);
    SelectionResult r;
    Json extra = Json::object();
    if (method == "skb" || method == "all") {
      FeatureMask mask = FeatureMask::all(ds.dims());
      if (method == "skb") {
        const std::size_t k = ctx.cfg.skb_k ? ctx.cfg.skb_k : lambda_count(sel.lambda_fraction, ds.dims());
        if (k > ds.dims()) throw ConfigError("skb.k: exceeds the dataset width " + std::to_string(ds.dims()));
        // Ranked on the training side of the first search split only.
        const auto splits = make_selection_splits(ds, sel);
        mask = skb(splits.search.front().train, k);
      }
      r = evaluate_mask(ds, mask, sel);
    } else if (method == "pca") {
      std::size_t k = 0;
      double ratio = 0.0;
      r = pca_baseline(ds, sel, ctx.cfg.pca_threshold, k, ratio);
      extra = {{"pca_components", k}, {"pca_explained_ratio", ratio}};
    } else {
      sel.swarm.algorithm = algorithm_from_string(method);
      r = select_features(ds, sel);
    }
    r.algorithm = sel.swarm.algorithm;
    Json run = selection_run(ds, r, seed, seconds_since(start));
    if (method == "skb" || method == "all" || method == "pca") {
      run["algorithm"] = method;
      run.erase("fitness_trace");
    }
    if (method == "pca") run.erase("model");
    run.update(extra);
    runs.push_back(std::move(run));
  }
  Report rep;
  rep.json["method"] = method;
  rep.json["runs"] = runs;
  rep.json["aggregate"] = selection_aggregate(runs);
  rep.text = selection_text("method " + method, runs, rep.json["aggregate"]);
  return rep;
}

Report run_importance(const Context& ctx) {
  Report rep = run_selection(ctx, to_string(ctx.cfg.select.swarm.algorithm));
  const auto& runs = rep.json["runs"];
  const std::size_t d = runs.front()["importance"].size();
  std::vector<std::size_t> total(d, 0);
  std::size_t evaluations = 0;
  for (const auto& run : runs) {
    const auto counts = run["importance"].get<std::vector<std::size_t>>();
    for (std::size_t j = 0; j < d; ++j) total[j] += counts[j];
    evaluations += run["evaluations"].get<std::size_t>();
  }
  std::vector<std::size_t> order(d);
  for (std::size_t j = 0; j < d; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return total[a] > total[b]; });

  std::vector<std::string> names;
  std::vector<bool> informative;
  if (!ctx.cfg.data_path.empty()) {
    names = ctx.dataset(0).feature_names;
  } else {
    const auto ds = ctx.dataset(ctx.cfg.seeds.front());
    names = ds.feature_names;
    informative = ds.informative;
  }
  Json ranking = Json::array();
  std::string text = "importance over " + std::to_string(evaluations) + " evaluations\n";
  text += "  rank  feature         count   score\n";
  for (std::size_t r = 0; r < d; ++r) {
    const auto j = order[r];
    const double score = evaluations ? static_cast<double>(total[j]) / static_cast<double>(evaluations) : 0.0;
    Json row = {{"rank", r + 1}, {"index", j}, {"name", names[j]}, {"count", total[j]}, {"score", score}};
    if (!informative.empty()) row["informative"] = static_cast<bool>(informative[j]);
    ranking.push_back(row);
    std::string name = names[j] + (!informative.empty() && informative[j] ? " *" : "");
    name.resize(std::max<std::size_t>(name.size(), 14), ' ');
    text += pad(std::to_string(r + 1), 6) + "  " + name + pad(std::to_string(total[j]), 7) +
            pad(fmt("%.4f", score), 8) + "\n";
  }
  rep.json["ranking"] = ranking;
  rep.json["aggregate"]["evaluations"] = evaluations;
  rep.text += text;
  return rep;
}

Objective bench_objective(const std::string& name) {
  if (name == "sphere") return [](std::span<const double> x) { return sphere(x); };
  if (name == "rastrigin") return [](std::span<const double> x) { return rastrigin(x); };
  if (name == "rastrigin-centered") return [](std::span<const double> x) { return rastrigin_centered(x); };
  throw ConfigError("bench: unknown function '" + name + "' (sphere, rastrigin, rastrigin-centered)");
}

Report run_bench(const Context& ctx, const std::string& sub) {
  const std::string function = sub.empty() ? ctx.cfg.bench_function : sub;
  const auto objective = bench_objective(function);
  const auto& algos = ctx.cfg.bench_algorithms;
  const auto& seeds = ctx.cfg.seeds;
  const std::size_t jobs = algos.size() * seeds.size();
  std::vector<Json> results(jobs);
  // One job per (algorithm, seed); each optimizer runs single-threaded.
  parallel_for(jobs, ctx.opts.threads, [&](std::size_t job) {
    const auto start = Clock::now();
    SwarmConfig sc = ctx.cfg.select.swarm;
    sc.algorithm = algorithm_from_string(algos[job / seeds.size()]);
    sc.dimension = ctx.cfg.bench_dimension;
    sc.max_evaluations = ctx.cfg.bench_max_evaluations;
    sc.seed = seeds[job % seeds.size()];
    sc.threads = 1;
    const auto r = optimize(objective, sc);
    results[job] = {{"algorithm", to_string(sc.algorithm)},
                    {"seed", sc.seed},
                    {"best_fitness", r.best_fitness},
                    {"best_x", r.best_x},
                    {"evaluations", r.evaluations_used},
                    {"generations", r.generations},
                    {"fitness_trace", r.fitness_trace},
                    {"wall_time_s", seconds_since(start)}};
  });
  Json runs = Json::array();
  Json agg = Json::object();
  std::string text = "bench " + function + ", d=" + std::to_string(ctx.cfg.bench_dimension) +
                     ", budget " + std::to_string(ctx.cfg.bench_max_evaluations) + "\n";
  text += "  algorithm   median best       min best       max best\n";
  for (std::size_t a = 0; a < algos.size(); ++a) {
    std::vector<double> best;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      best.push_back(results[a * seeds.size() + s]["best_fitness"].get<double>());
      runs.push_back(std::move(results[a * seeds.size() + s]));
    }
    const auto name = to_string(algorithm_from_string(algos[a]));
    const double med = median(best);
    const double lo = *std::min_element(best.begin(), best.end());
    const double hi = *std::max_element(best.begin(), best.end());
    agg[name] = {{"median_best", med}, {"min_best", lo}, {"max_best", hi}};
    std::string label = name;
    label.resize(9, ' ');
    text += "  " + label + pad(fmt("%.6g", med), 15) + pad(fmt("%.6g", lo), 15) + pad(fmt("%.6g", hi), 15) + "\n";
  }
  Report rep;
  rep.json["method"] = "bench:" + function;
  rep.json["runs"] = runs;
  rep.json["aggregate"] = agg;
  rep.text = text;
  return rep;
}

std::filesystem::path out_path(const Context& ctx, const std::string& name) {
  auto dir = ctx.opts.out_dir.empty() ? std::filesystem::path(".") : ctx.opts.out_dir;
  std::filesystem::create_directories(dir);
  return dir / name;
}

PulseVideoSpec video_spec(const ExperimentConfig& cfg, std::uint64_t seed, Roi roi) {
  PulseVideoSpec spec = cfg.video;
  spec.seed = roi == Roi::Fore ? seed : Rng::mix(seed ^ 0x6e6f7365ULL);
  return spec;
}

Report run_synth(const Context& ctx, const std::string& sub) {
  const std::string what = sub.empty() ? "dataset" : sub;
  if (what != "dataset" && what != "video") throw ConfigError("synth: unknown target '" + what + "' (dataset, video)");
  Json runs = Json::array();
  std::string text = "synth " + what + "\n";
  for (auto seed : ctx.cfg.seeds) {
    Json run = {{"seed", seed}};
    if (what == "dataset") {
      SynthSpec spec = ctx.cfg.synth;
      spec.seed = seed;
      const auto ds = generate_synthetic(spec);
      const std::string file = "synth_seed" + std::to_string(seed) + ".csv";
      write_file_atomic(out_path(ctx, file), format_csv(ds));
      std::vector<std::size_t> informative;
      for (std::size_t j = 0; j < ds.informative.size(); ++j)
        if (ds.informative[j]) informative.push_back(j);
      run.update({{"file", file}, {"rows", ds.rows()}, {"dims", ds.dims()}, {"positives", ds.positives()},
                  {"informative", informative}});
      text += "  " + file + "  rows " + std::to_string(ds.rows()) + "  positives " + std::to_string(ds.positives()) +
              "\n";
    } else {
      for (Roi roi : {Roi::Fore, Roi::Nose}) {
        const auto frames = synth_pulse_video(video_spec(ctx.cfg, seed, roi));
        const std::string file = to_string(roi) + "_seed" + std::to_string(seed) + ".ippg";
        const auto bytes = encode_frames(frames);
        write_file_atomic(out_path(ctx, file), std::string(bytes.begin(), bytes.end()));
        run[to_string(roi)] = {{"file", file}, {"frames", frames.frames}};
        text += "  " + file + "  frames " + std::to_string(frames.frames) + "\n";
      }
    }
    runs.push_back(std::move(run));
  }
  Report rep;
  rep.json["method"] = "synth:" + what;
  rep.json["runs"] = runs;
  rep.json["aggregate"] = {{"files", runs.size() * (what == "video" ? 2 : 1)}};
  rep.text = text;
  return rep;
}

double feature_value(const FeatureVector& fv, const std::string& name) {
  auto it = std::find(fv.names.begin(), fv.names.end(), name);
  if (it == fv.names.end()) throw InvariantError("ippg: missing feature " + name);
  return fv.values[static_cast<std::size_t>(it - fv.names.begin())];
}

Report run_ippg(const Context& ctx) {
  const bool from_files = !ctx.cfg.ippg_fore.empty() || !ctx.cfg.ippg_nose.empty();
  if (from_files && (ctx.cfg.ippg_fore.empty() || ctx.cfg.ippg_nose.empty()))
    throw ConfigError("ippg.fore/ippg.nose: both files are required");
  Json runs = Json::array();
  std::vector<double> hr_err, rr_err;
  std::string text = "ippg peaks (fore, G channel)\n      seed   hr (Hz)   rr (Hz)  features\n";
  std::vector<std::string> feature_names;
  const std::vector<std::uint64_t> seeds = from_files ? std::vector<std::uint64_t>{0} : ctx.cfg.seeds;
  for (auto seed : seeds) {
    const auto start = Clock::now();
    const auto fore = from_files ? read_frames(ctx.cfg.ippg_fore) : synth_pulse_video(video_spec(ctx.cfg, seed, Roi::Fore));
    const auto nose = from_files ? read_frames(ctx.cfg.ippg_nose) : synth_pulse_video(video_spec(ctx.cfg, seed, Roi::Nose));
    const auto fv = extract_features(fore, nose);
    feature_names = fv.names;
    Json peaks = Json::object();
    for (const char* roi : {"fore", "nose"})
      for (const char* ch : {"R", "G", "B"})
        for (const char* band : {"hr", "rr"}) {
          const std::string key = std::string(roi) + "_" + ch + "_" + band + "_peak_hz";
          peaks[key] = feature_value(fv, key);
        }
    const double hr = peaks["fore_G_hr_peak_hz"].get<double>();
    const double rr = peaks["fore_G_rr_peak_hz"].get<double>();
    Json run = {{"seed", seed}, {"frames", fore.frames}, {"fps", fore.fps}, {"feature_count", fv.values.size()},
                {"peaks", peaks}, {"features", fv.values}, {"wall_time_s", seconds_since(start)}};
    if (!from_files) {
      hr_err.push_back(std::abs(hr - ctx.cfg.video.heart_hz));
      rr_err.push_back(std::abs(rr - ctx.cfg.video.breath_hz));
      run["hr_error_hz"] = hr_err.back();
      run["rr_error_hz"] = rr_err.back();
    }
    runs.push_back(std::move(run));
    text += pad(std::to_string(seed), 10) + pad(fmt("%.4f", hr), 10) + pad(fmt("%.4f", rr), 10) +
            pad(std::to_string(fv.values.size()), 10) + "\n";
  }
  Report rep;
  rep.json["method"] = "ippg";
  rep.json["feature_names"] = feature_names;
  rep.json["pipeline"] = {{"filter", "butterworth band-pass, zero-phase (forward-backward)"},
                          {"filter_order", kFilterOrder},
                          {"hr_band_hz", {kHeartBand.low, kHeartBand.high}},
                          {"rr_band_hz", {kBreathBand.low, kBreathBand.high}},
                          {"window", "hann"},
                          {"fft_size", "next power of two >= frames"},
                          {"statistics", {"mean", "std", "min", "max", "median"}}};
  rep.json["runs"] = runs;
  Json agg = Json::object();
  if (!hr_err.empty()) {
    agg["hr_error_median_hz"] = median(hr_err);
    agg["rr_error_median_hz"] = median(rr_err);
    text += "  median |error|  hr " + fmt("%.4f", median(hr_err)) + " Hz  rr " + fmt("%.4f", median(rr_err)) + " Hz\n";
  }
  rep.json["aggregate"] = agg;
  rep.text = text;
  return rep;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, const std::string& command, const std::string& sub,
                      const RunOptions& opts) {
  validate_config(cfg);
  const auto start = Clock::now();
  Context ctx{cfg, opts, std::nullopt};
  const bool needs_data = command == "select" || command == "baseline" || command == "importance";
  if (needs_data && !cfg.data_path.empty()) ctx.loaded = load_csv(cfg.data_path);

  Report rep;
  if (command == "select") {
    if (!sub.empty()) throw ConfigError("select: takes no subcommand (set swarm.algorithm)");
    rep = run_selection(ctx, to_string(cfg.select.swarm.algorithm));
  } else if (command == "baseline") {
    static const std::vector<std::string> known{"fa", "pso", "ba", "skb", "all", "pca"};
    if (std::find(known.begin(), known.end(), sub) == known.end())
      throw ConfigError("baseline: expected one of fa, pso, ba, skb, all, pca; got '" + sub + "'");
    rep = run_selection(ctx, sub);
  } else if (command == "bench") {
    rep = run_bench(ctx, sub);
  } else if (command == "synth") {
    rep = run_synth(ctx, sub);
  } else if (command == "ippg") {
    rep = run_ippg(ctx);
  } else if (command == "importance") {
    rep = run_importance(ctx);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }

  Json out = {{"schema_version", kReportSchemaVersion},
              {"tool", "fwsel"},
              {"version", FWSEL_VERSION},
              {"command", command},
              {"subcommand", sub},
              {"config", config_to_json(cfg)}};
  out.update(rep.json);
  out["wall_time_s"] = seconds_since(start);
  rep.json = std::move(out);
  return rep;
}

std::string compare_table(const std::vector<Json>& reports, std::size_t reference) {
  if (reports.empty()) throw ConfigError("compare: no reports");
  if (reference >= reports.size()) throw ConfigError("compare: reference index out of range");
  auto protocol = [](const Json& rep) {
    if (!rep.contains("config") || !rep.contains("aggregate") || !rep["aggregate"].contains("avg_median"))
      throw ConfigError("compare: report lacks config or avg_median (only selection reports compare)");
    Json p = Json::object();
    for (const auto& [key, value] : rep["config"].items())
      if (key.rfind("data.", 0) == 0 || key.rfind("synth.", 0) == 0 || key.rfind("split.", 0) == 0 ||
          key == "run.seeds")
        p[key] = value;
    return p;
  };
  const Json ref_protocol = protocol(reports[reference]);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const Json p = protocol(reports[i]);
    if (p == ref_protocol) continue;
    for (const auto& [key, value] : ref_protocol.items())
      if (!p.contains(key) || p[key] != value)
        throw ConfigError("compare: report " + std::to_string(i + 1) + " differs from the reference on " + key);
    throw ConfigError("compare: report " + std::to_string(i + 1) + " uses a different protocol");
  }
  std::vector<std::size_t> order{reference};
  for (std::size_t i = 0; i < reports.size(); ++i)
    if (i != reference) order.push_back(i);
  const double ref_avg = 100.0 * reports[reference]["aggregate"]["avg_median"].get<double>();
  std::string out = "method          Avg(%)   dAvg(%)\n";
  for (auto i : order) {
    std::string method = reports[i].value("method", "?");
    if (i == reference) method += " (ref)";
    method.resize(std::max<std::size_t>(method.size(), 14), ' ');
    const double a = 100.0 * reports[i]["aggregate"]["avg_median"].get<double>();
    double delta = a - ref_avg;
    if (std::abs(delta) < 0.005) delta = 0.0;  // keeps "-0.00" out of the table
    out += method + pad(fmt("%.2f", a), 8) + pad(fmt("%+.2f", delta), 10) + "\n";
  }
  return out;
}

std::string report_to_string(const Json& report) { return report.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(tmp.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError(path.string() + ": rename failed: " + ec.message());
  }
}

}  // namespace fwsel
