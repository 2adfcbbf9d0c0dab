#pragma once

#include <cstddef>
#include <span>

namespace fwsel {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// The six ratios that make up the wrapper loss. All fields lie in [0, 1].
struct MetricSet {
  double auc = 0.0;
  double acc = 0.0;
  double pre = 0.0;
  double sen = 0.0;
  double f1 = 0.0;
  double spe = 0.0;

  double sum() const { return auc + acc + pre + sen + f1 + spe; }
  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions);

// Degenerate denominators: Pre = 0 if tp+fp = 0, Sen = 0 if tp+fn = 0,
// Spe = 1 if tn+fp = 0, F1 = 0 if 2tp+fp+fn = 0. The auc field is left at 0.
MetricSet basic_metrics(const ConfusionMatrix& cm);

// Mann-Whitney statistic: P(score_pos > score_neg) with ties counted as 1/2.
double auc(std::span<const int> labels, std::span<const double> scores);

// Arithmetic mean of the six fields.
double avg(const MetricSet& ms);

MetricSet evaluate(std::span<const int> labels, std::span<const int> predictions, std::span<const double> scores);

}  // namespace fwsel
