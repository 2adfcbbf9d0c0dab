#include "fwsel/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fwsel/parallel.hpp"

namespace fwsel {

std::size_t FeatureMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<std::size_t> FeatureMask::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) out.push_back(j);
  return out;
}

void SelectionConfig::validate() const {
  if (!(lambda_fraction > 0.0 && lambda_fraction < 1.0))
    throw std::invalid_argument("select.lambda_fraction: must be in (0, 1)");
  if (rounds < 1) throw std::invalid_argument("adaboost.rounds: must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("split.test_fraction: must be in (0, 1)");
  if (split_repeats < 1) throw std::invalid_argument("split.repeats: must be >= 1");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
    throw std::invalid_argument("split.holdout_fraction: must be in [0, 1)");
}

void ImportanceTracker::record(const FeatureMask& mask) {
  if (mask.size() != counts_.size()) throw std::invalid_argument("ImportanceTracker: mask length mismatch");
  for (std::size_t j = 0; j < counts_.size(); ++j) counts_[j] += mask.bits[j];
  ++evaluations_;
}

void ImportanceTracker::merge(const ImportanceTracker& other) {
  if (other.counts_.size() != counts_.size()) throw std::invalid_argument("ImportanceTracker: size mismatch");
  for (std::size_t j = 0; j < counts_.size(); ++j) counts_[j] += other.counts_[j];
  evaluations_ += other.evaluations_;
}

FeatureMask discretize(std::span<const double> x) {
  FeatureMask mask;
  mask.bits.reserve(x.size());
  for (double v : x) mask.bits.push_back(v < 0.5 ? 0 : 1);
  return mask;
}

std::size_t lambda_count(double fraction, std::size_t d) {
  // The small slack keeps products such as 0.2 * 25 from rounding up past 5.
  const auto raw = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d) - 1e-9));
  return std::clamp<std::size_t>(raw, 1, std::max<std::size_t>(d, 1));
}

void repair(FeatureMask& mask, std::size_t lambda, Rng& rng) {
  if (lambda > mask.size()) throw std::invalid_argument("repair: lambda exceeds mask length");
  std::size_t have = mask.count();
  if (have >= lambda) return;
  std::vector<std::size_t> zeros;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (!mask.bits[j]) zeros.push_back(j);
  std::shuffle(zeros.begin(), zeros.end(), rng);
  for (std::size_t k = 0; have < lambda; ++k, ++have) mask.bits[zeros[k]] = 1;
}

FitnessOutcome fitness(const FeatureMask& mask, const SplitPair& split, std::size_t rounds, std::size_t lambda) {
  const SplitPair* one = &split;
  return fitness(mask, std::span<const SplitPair>(one, 1), rounds, lambda);
}

FitnessOutcome fitness(const FeatureMask& mask, std::span<const SplitPair> splits, std::size_t rounds,
                       std::size_t lambda) {
  const std::size_t selected = mask.count();
  if (selected < std::max<std::size_t>(lambda, 1))
    throw InvariantError("fitness: mask selects " + std::to_string(selected) + " feature(s), below the floor of " +
                         std::to_string(std::max<std::size_t>(lambda, 1)));
  if (splits.empty()) throw std::invalid_argument("fitness: no splits");
  const auto cols = mask.selected();
  MetricSet mean;
  for (const auto& split : splits) {
    if (mask.size() != split.train.dims()) throw std::invalid_argument("fitness: mask length does not match dataset");
    const Matrix train_x = split.train.features.select_cols(cols);
    const Matrix test_x = split.test.features.select_cols(cols);
    const auto model = train_adaboost(train_x, split.train.labels, rounds);
    const auto scores = decision_scores(model, test_x);
    std::vector<int> preds(scores.size());
    std::transform(scores.begin(), scores.end(), preds.begin(), [](double s) { return s >= 0.0 ? 1 : 0; });
    const MetricSet ms = evaluate(split.test.labels, preds, scores);
    mean.auc += ms.auc;
    mean.acc += ms.acc;
    mean.pre += ms.pre;
    mean.sen += ms.sen;
    mean.f1 += ms.f1;
    mean.spe += ms.spe;
  }
  const auto n = static_cast<double>(splits.size());
  for (double* f : {&mean.auc, &mean.acc, &mean.pre, &mean.sen, &mean.f1, &mean.spe}) *f /= n;
  return {-mean.sum(), mean};
}

SelectionSplits make_selection_splits(const Dataset& ds, const SelectionConfig& cfg) {
  SelectionSplits out;
  Dataset search = ds;
  if (cfg.holdout_fraction > 0.0) {
    // The holdout uses its own seed stream so the search splits stay comparable.
    auto outer = stratified_split(ds, cfg.holdout_fraction, cfg.split_seed ^ 0x686f6c646f7574ULL);
    search = outer.train;
    out.holdout = std::move(outer);
  }
  for (std::size_t r = 0; r < cfg.split_repeats; ++r) out.search.push_back(stratified_split(search, cfg.test_fraction, cfg.split_seed + r));
  return out;
}

namespace {

std::uint64_t mask_hash(const FeatureMask& mask) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : mask.bits) h = (h ^ b) * 0x100000001b3ULL;
  return h;
}

void finish(SelectionResult& result, const SelectionSplits& splits, const SelectionConfig& cfg) {
  const auto cols = result.best_mask.selected();
  const auto& first = splits.search.front();
  result.model = train_adaboost(first.train.features.select_cols(cols), first.train.labels, cfg.rounds);
  if (splits.holdout) {
    const auto& h = *splits.holdout;
    const auto model = train_adaboost(h.train.features.select_cols(cols), h.train.labels, cfg.rounds);
    const auto scores = decision_scores(model, h.test.features.select_cols(cols));
    std::vector<int> preds(scores.size());
    std::transform(scores.begin(), scores.end(), preds.begin(), [](double s) { return s >= 0.0 ? 1 : 0; });
    result.holdout_metrics = evaluate(h.test.labels, preds, scores);
  }
}

}  // namespace

SelectionResult select_features(const Dataset& ds, const SelectionConfig& cfg_in) {
  cfg_in.validate();
  ds.validate();
  SelectionConfig cfg = cfg_in;
  const std::size_t d = ds.dims();
  if (d == 0) throw DataError("select_features: dataset has no feature columns");
  cfg.swarm.dimension = d;
  const auto splits = make_selection_splits(ds, cfg);
  const std::size_t lambda = lambda_count(cfg.lambda_fraction, d);

  SelectionResult result;
  result.algorithm = cfg.swarm.algorithm;
  result.lambda = lambda;
  result.loss = std::numeric_limits<double>::infinity();
  result.min_selected = d;
  ImportanceTracker tracker(d);

  BatchObjective objective = [&](const std::vector<std::vector<double>>& xs) {
    std::vector<FeatureMask> masks(xs.size());
    std::vector<FitnessOutcome> outcomes(xs.size());
    parallel_for(xs.size(), cfg.swarm.threads, [&](std::size_t i) {
      masks[i] = discretize(xs[i]);
      auto rng = make_stream(cfg.swarm.seed, Stream::Repair, {mask_hash(masks[i])});
      repair(masks[i], lambda, rng);
      outcomes[i] = fitness(masks[i], splits.search, cfg.rounds, lambda);
    });
    // Bookkeeping runs in candidate order, independent of the worker count.
    std::vector<double> losses(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      tracker.record(masks[i]);
      result.min_selected = std::min(result.min_selected, masks[i].count());
      losses[i] = outcomes[i].loss;
      if (outcomes[i].loss < result.loss) {
        result.loss = outcomes[i].loss;
        result.best_metrics = outcomes[i].metrics;
        result.best_mask = masks[i];
      }
    }
    return losses;
  };

  const OptResult opt = optimize_batch(objective, cfg.swarm);
  if (opt.evaluations_used != tracker.evaluations())
    throw InvariantError("select_features: evaluation accounting mismatch");
  result.importance = tracker.counts();
  result.evaluations = opt.evaluations_used;
  result.fitness_trace = opt.fitness_trace;
  finish(result, splits, cfg);
  return result;
}

SelectionResult evaluate_mask(const Dataset& ds, const FeatureMask& mask, const SelectionConfig& cfg) {
  cfg.validate();
  ds.validate();
  if (mask.size() != ds.dims()) throw std::invalid_argument("evaluate_mask: mask length does not match dataset");
  const auto splits = make_selection_splits(ds, cfg);
  SelectionResult result;
  result.best_mask = mask;
  result.lambda = 0;
  const auto outcome = fitness(mask, splits.search, cfg.rounds, 1);
  result.loss = outcome.loss;
  result.best_metrics = outcome.metrics;
  result.evaluations = 1;
  result.min_selected = mask.count();
  ImportanceTracker tracker(mask.size());
  tracker.record(mask);
  result.importance = tracker.counts();
  finish(result, splits, cfg);
  return result;
}

std::vector<double> anova_f(const Dataset& ds) {
  const std::size_t n = ds.rows();
  std::vector<double> f(ds.dims(), 0.0);
  const std::size_t n1 = ds.positives();
  const std::size_t n0 = n - n1;
  if (n0 == 0 || n1 == 0 || n < 3) return f;
  for (std::size_t c = 0; c < ds.dims(); ++c) {
    double sum[2] = {0, 0};
    for (std::size_t r = 0; r < n; ++r) sum[ds.labels[r]] += ds.features(r, c);
    const double mean0 = sum[0] / static_cast<double>(n0);
    const double mean1 = sum[1] / static_cast<double>(n1);
    const double grand = (sum[0] + sum[1]) / static_cast<double>(n);
    double ssw = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dev = ds.features(r, c) - (ds.labels[r] ? mean1 : mean0);
      ssw += dev * dev;
    }
    const double ssb = static_cast<double>(n0) * (mean0 - grand) * (mean0 - grand) +
                       static_cast<double>(n1) * (mean1 - grand) * (mean1 - grand);
    if (ssb + ssw == 0.0) f[c] = 0.0;
    else if (ssw == 0.0) f[c] = std::numeric_limits<double>::infinity();
    else f[c] = ssb / (ssw / static_cast<double>(n - 2));
  }
  return f;
}

FeatureMask skb(const Dataset& ds, std::size_t k) {
  const std::size_t d = ds.dims();
  if (k < 1 || k > d) throw std::invalid_argument("skb: k must be in [1, d]");
  const auto f = anova_f(ds);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] > f[b]; });
  FeatureMask mask{std::vector<std::uint8_t>(d, 0)};
  for (std::size_t i = 0; i < k; ++i) mask.bits[order[i]] = 1;
  return mask;
}

}  // namespace fwsel
