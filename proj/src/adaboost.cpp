#include "fwsel/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace fwsel {

namespace {

using SortedColumns = std::vector<std::vector<std::size_t>>;

SortedColumns presort(const Matrix& x) {
  SortedColumns order(x.cols(), std::vector<std::size_t>(x.rows()));
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& idx = order[f];
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
  }
  return order;
}

// Error comparisons tolerate summation-order noise so ties resolve by index.
constexpr double kTieSlack = 1e-12;

StumpFit best_stump(const Matrix& x, std::span<const int> y, std::span<const double> w, const SortedColumns& order) {
  double total = 0, total_pos = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += w[i];
    if (y[i] > 0) total_pos += w[i];
  }
  const double total_neg = total - total_pos;

  StumpFit best;
  best.error = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t f, double thr, double pos_below, double neg_below) {
    // Polarity +1 predicts -1 at or below the threshold.
    const double err_plus = pos_below + (total_neg - neg_below);
    const double err_minus = total - err_plus;
    if (err_plus < best.error - kTieSlack) best = {{f, thr, +1, 0.0}, err_plus};
    if (err_minus < best.error - kTieSlack) best = {{f, thr, -1, 0.0}, err_minus};
  };

  for (std::size_t f = 0; f < x.cols(); ++f) {
    const auto& idx = order[f];
    if (idx.empty()) continue;
    consider(f, x(idx.front(), f) - 1.0, 0.0, 0.0);
    double pos_below = 0, neg_below = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i = idx[k];
      (y[i] > 0 ? pos_below : neg_below) += w[i];
      if (k + 1 < idx.size()) {
        const double lo = x(i, f), hi = x(idx[k + 1], f);
        if (lo < hi) consider(f, lo + 0.5 * (hi - lo), pos_below, neg_below);
      }
    }
  }
  best.error = std::clamp(best.error, 0.0, 1.0);
  return best;
}

void check_dims(const AdaBoostModel& model, const Matrix& x) {
  if (model.dims != 0 && x.cols() != model.dims)
    throw std::invalid_argument("adaboost: expected " + std::to_string(model.dims) + " columns, got " +
                                std::to_string(x.cols()));
  for (const auto& s : model.stumps)
    if (s.feature_index >= x.cols()) throw std::invalid_argument("adaboost: stump feature index out of range");
}

}  // namespace

StumpFit train_stump(const Matrix& x, std::span<const int> y, std::span<const double> w) {
  if (y.size() != x.rows() || w.size() != x.rows()) throw std::invalid_argument("train_stump: size mismatch");
  return best_stump(x, y, w, presort(x));
}

AdaBoostModel train_adaboost(const Matrix& x, std::span<const int> labels, std::size_t rounds,
                             std::vector<BoostRound>* trace) {
  const std::size_t n = x.rows();
  if (labels.size() != n) throw std::invalid_argument("train_adaboost: label count mismatch");
  if (rounds < 1) throw std::invalid_argument("train_adaboost: rounds must be >= 1");
  if (x.cols() == 0) throw std::invalid_argument("train_adaboost: no feature columns");
  std::vector<int> y(n);
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = labels[i] == 1 ? 1 : -1;
    n_pos += labels[i] == 1;
  }
  if (n_pos == 0 || n_pos == n) throw DataError("train_adaboost: training labels contain a single class");

  const auto order = presort(x);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> margin(n, 0.0);
  AdaBoostModel model;
  model.rounds = rounds;
  model.dims = x.cols();
  double bound = 1.0;

  for (std::size_t t = 0; t < rounds; ++t) {
    StumpFit fit = best_stump(x, y, w, order);
    const double eps = std::clamp(fit.error, kErrorClamp, 1.0 - kErrorClamp);
    fit.stump.alpha = 0.5 * std::log((1.0 - eps) / eps);
    model.stumps.push_back(fit.stump);
    bound *= 2.0 * std::sqrt(eps * (1.0 - eps));

    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int h = fit.stump.vote(x.row(i));
      margin[i] += fit.stump.alpha * h;
      w[i] *= std::exp(-fit.stump.alpha * y[i] * h);
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;

    if (trace) {
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < n; ++i) wrong += (margin[i] >= 0 ? 1 : -1) != y[i];
      trace->push_back({fit.error, bound, static_cast<double>(wrong) / static_cast<double>(n),
                        std::accumulate(w.begin(), w.end(), 0.0), *std::min_element(w.begin(), w.end())});
    }
    if (fit.error <= kErrorClamp) break;
  }
  return model;
}

std::vector<double> decision_scores(const AdaBoostModel& model, const Matrix& x) {
  check_dims(model, x);
  std::vector<double> scores(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (const auto& s : model.stumps) scores[r] += s.alpha * s.vote(row);
  }
  return scores;
}

std::vector<int> predict(const AdaBoostModel& model, const Matrix& x) {
  auto scores = decision_scores(model, x);
  std::vector<int> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(), [](double s) { return s >= 0.0 ? 1 : 0; });
  return out;
}

std::string model_to_json(const AdaBoostModel& model) {
  auto arr = nlohmann::json::array();
  for (const auto& s : model.stumps)
    arr.push_back({{"feature_index", s.feature_index},
                   {"threshold", s.threshold},
                   {"polarity", s.polarity},
                   {"alpha", s.alpha}});
  return arr.dump();
}

AdaBoostModel model_from_json(const std::string& text) {
  AdaBoostModel model;
  try {
    auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw DataError("adaboost model: expected a JSON array");
    for (const auto& item : arr) {
      Stump s;
      s.feature_index = item.at("feature_index").get<std::size_t>();
      s.threshold = item.at("threshold").get<double>();
      s.polarity = item.at("polarity").get<int>();
      s.alpha = item.at("alpha").get<double>();
      if (s.polarity != 1 && s.polarity != -1) throw DataError("adaboost model: polarity must be +1 or -1");
      if (!std::isfinite(s.alpha)) throw DataError("adaboost model: non-finite alpha");
      model.stumps.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("adaboost model: ") + e.what());
  }
  model.rounds = model.stumps.size();
  return model;
}

}  // namespace fwsel
