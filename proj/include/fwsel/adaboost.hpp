#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fwsel/common.hpp"

namespace fwsel {

/// Depth-1 decision stump: h(x) = polarity if x[feature] > threshold, else -polarity.
struct Stump {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  int polarity = 1;
  double alpha = 0.0;

  int vote(std::span<const double> x) const { return x[feature_index] > threshold ? polarity : -polarity; }
  friend bool operator==(const Stump&, const Stump&) = default;
};

struct StumpFit {
  Stump stump;
  double error = 0.0;  // weighted 0-1 error
};

struct AdaBoostModel {
  std::vector<Stump> stumps;
  std::size_t rounds = 0;
  std::size_t dims = 0;

  friend bool operator==(const AdaBoostModel&, const AdaBoostModel&) = default;
};

// Per-round diagnostics, filled when a trace is requested from train().
struct BoostRound {
  double error = 0.0;        // unclamped weighted error of the round's stump
  double bound = 0.0;        // running product of 2*sqrt(e(1-e)) with clamped e
  double train_error = 0.0;  // ensemble 0-1 error on the training rows
  double weight_sum = 0.0;   // after renormalization
  double weight_min = 0.0;
};

inline constexpr double kErrorClamp = 1e-10;
inline constexpr std::size_t kDefaultRounds = 50;

// Exhaustive search over (feature, threshold, polarity). Candidate thresholds
// are min-1 and the midpoints between consecutive distinct values. Ties go to
// the lowest feature, then the lowest threshold, then polarity +1.
// y holds -1/+1 labels; w must sum to 1.
StumpFit train_stump(const Matrix& x, std::span<const int> y, std::span<const double> w);

// Discrete AdaBoost on 0/1 labels. Stops early once a stump reaches
// weighted error <= 1e-10.
AdaBoostModel train_adaboost(const Matrix& x, std::span<const int> labels, std::size_t rounds,
                             std::vector<BoostRound>* trace = nullptr);

// Unnormalized margin sum_t alpha_t * h_t(x).
std::vector<double> decision_scores(const AdaBoostModel& model, const Matrix& x);
// 1 where the margin is >= 0.
std::vector<int> predict(const AdaBoostModel& model, const Matrix& x);

std::string model_to_json(const AdaBoostModel& model);
AdaBoostModel model_from_json(const std::string& text);

}  // namespace fwsel
