#include "fwsel/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fwsel/common.hpp"

namespace fwsel {

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions) {
  if (labels.size() != predictions.size())
    throw std::invalid_argument("confusion: labels and predictions differ in length");
  if (labels.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pos = labels[i] == 1;
    const bool hit = predictions[i] == 1;
    if (pos && hit) ++cm.tp;
    else if (pos) ++cm.fn;
    else if (hit) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

MetricSet basic_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("basic_metrics: empty confusion matrix");
  const auto tp = static_cast<double>(cm.tp);
  const auto tn = static_cast<double>(cm.tn);
  const auto fp = static_cast<double>(cm.fp);
  const auto fn = static_cast<double>(cm.fn);
  MetricSet ms;
  ms.acc = (tp + tn) / (tp + tn + fp + fn);
  ms.pre = cm.tp + cm.fp > 0 ? tp / (tp + fp) : 0.0;
  ms.sen = cm.tp + cm.fn > 0 ? tp / (tp + fn) : 0.0;
  ms.f1 = 2 * cm.tp + cm.fp + cm.fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  ms.spe = cm.tn + cm.fp > 0 ? tn / (tn + fp) : 1.0;
  return ms;
}

double auc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw std::invalid_argument("auc: labels and scores differ in length");
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // Sum of midranks of the positives; tied groups share their average rank.
  double rank_sum = 0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) {
        rank_sum += midrank;
        ++n_pos;
      }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: undefined for single-class input");
  const auto p = static_cast<double>(n_pos);
  const auto q = static_cast<double>(n_neg);
  return (rank_sum - p * (p + 1) / 2) / (p * q);
}

double avg(const MetricSet& ms) { return ms.sum() / 6.0; }

MetricSet evaluate(std::span<const int> labels, std::span<const int> predictions, std::span<const double> scores) {
  MetricSet ms = basic_metrics(confusion(labels, predictions));
  ms.auc = auc(labels, scores);
  return ms;
}

}  // namespace fwsel
