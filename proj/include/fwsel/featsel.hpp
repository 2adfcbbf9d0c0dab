#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fwsel/adaboost.hpp"
#include "fwsel/dataset.hpp"
#include "fwsel/metrics.hpp"
#include "fwsel/swarm.hpp"

namespace fwsel {

struct FeatureMask {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::size_t count() const;
  std::vector<std::size_t> selected() const;

  static FeatureMask all(std::size_t d) { return {std::vector<std::uint8_t>(d, 1)}; }
  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

struct SelectionConfig {
  SwarmConfig swarm;  // swarm.dimension is overwritten with the dataset width
  double lambda_fraction = 0.2;
  std::size_t rounds = kDefaultRounds;
  double test_fraction = 0.3;
  std::uint64_t split_seed = 0;
  std::size_t split_repeats = 1;   // fitness averaged over this many stratified splits
  double holdout_fraction = 0.0;   // > 0 reserves an untouched holdout for final scoring

  void validate() const;
};

struct FitnessOutcome {
  double loss = 0.0;
  MetricSet metrics;
};

class ImportanceTracker {
 public:
  explicit ImportanceTracker(std::size_t d = 0) : counts_(d, 0) {}

  void record(const FeatureMask& mask);
  // Adds another tracker's tallies; addition commutes, so merge order is irrelevant.
  void merge(const ImportanceTracker& other);

  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  std::vector<std::size_t> counts_;
  std::size_t evaluations_ = 0;
};

struct SelectionResult {
  Algorithm algorithm = Algorithm::Ifa;
  FeatureMask best_mask;
  MetricSet best_metrics;
  double loss = 0.0;
  std::vector<std::size_t> importance;
  std::size_t evaluations = 0;
  std::size_t lambda = 0;
  std::size_t min_selected = 0;  // smallest popcount seen by any fitness evaluation
  std::vector<double> fitness_trace;
  AdaBoostModel model;
  std::optional<MetricSet> holdout_metrics;
};

// Bit j is 0 iff x_j < 0.5.
FeatureMask discretize(std::span<const double> x);

// ceil(fraction * d), never below 1.
std::size_t lambda_count(double fraction, std::size_t d);

// Turns uniformly chosen zero bits on until at least lambda bits are set.
// Never clears a bit.
void repair(FeatureMask& mask, std::size_t lambda, Rng& rng);

// Trains AdaBoost on the selected train columns and scores the test rows.
// loss = -(auc + acc + pre + sen + f1 + spe). Throws InvariantError when the
// mask selects fewer than max(lambda, 1) columns.
FitnessOutcome fitness(const FeatureMask& mask, const SplitPair& split, std::size_t rounds, std::size_t lambda);
FitnessOutcome fitness(const FeatureMask& mask, std::span<const SplitPair> splits, std::size_t rounds,
                       std::size_t lambda);

// Splits used by the wrapper: the holdout (if any) is carved off first.
struct SelectionSplits {
  std::vector<SplitPair> search;
  std::optional<SplitPair> holdout;
};
SelectionSplits make_selection_splits(const Dataset& ds, const SelectionConfig& cfg);

SelectionResult select_features(const Dataset& ds, const SelectionConfig& cfg);

// Scores a fixed mask under the same split protocol as select_features.
SelectionResult evaluate_mask(const Dataset& ds, const FeatureMask& mask, const SelectionConfig& cfg);

// One-way ANOVA F statistic per column (0 for zero-variance columns,
// +inf for columns that separate the classes with no within-class spread).
std::vector<double> anova_f(const Dataset& ds);
// The k columns with the largest F statistic; ties go to the lower index.
FeatureMask skb(const Dataset& ds, std::size_t k);

}  // namespace fwsel
