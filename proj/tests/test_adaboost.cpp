#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fwsel/adaboost.hpp"
#include "fwsel/rng.hpp"

using namespace fwsel;

namespace {

Matrix column(std::vector<double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

// Scans every (feature, threshold, polarity) in the documented tie order.
StumpFit scan(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w) {
  StumpFit best;
  best.error = 2.0;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> values;
    for (std::size_t i = 0; i < x.rows(); ++i) values.insert(x(i, f));
    std::vector<double> thr{*values.begin() - 1.0};
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) thr.push_back((*it + *std::next(it)) / 2.0);
    for (double t : thr)
      for (int pol : {1, -1}) {
        double e = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
          const int h = x(i, f) > t ? pol : -pol;
          if (h != y[i]) e += w[i];
        }
        if (e < best.error - 1e-12) best = {{f, t, pol, 0.0}, e};
      }
  }
  return best;
}

}  // namespace

TEST_SUITE("adaboost") {
  TEST_CASE("separable 1-D stump") {
    const auto fit = train_stump(column({1, 2, 3, 4}), std::vector{-1, -1, 1, 1}, std::vector(4, 0.25));
    CHECK(fit.stump.threshold == 2.5);
    CHECK(fit.stump.polarity == 1);
    CHECK(fit.error == 0.0);
  }

  TEST_CASE("single-label stump is deterministic") {
    const auto x = column({3, 1, 2});
    const auto a = train_stump(x, std::vector{1, 1, 1}, std::vector(3, 1.0 / 3));
    const auto b = train_stump(x, std::vector{1, 1, 1}, std::vector(3, 1.0 / 3));
    CHECK(a.error == 0.0);
    CHECK(a.stump == b.stump);
    CHECK(a.stump.threshold == 0.0);  // min - 1, polarity +1: everything votes +1
    CHECK(a.stump.polarity == 1);
  }

  TEST_CASE("noise feature loses to the separable one") {
    Matrix x(6, 2);
    const std::vector<int> y{-1, -1, -1, 1, 1, 1};
    const double noise[] = {0.3, 0.9, 0.1, 0.5, 0.2, 0.8};
    for (std::size_t i = 0; i < 6; ++i) {
      x(i, 0) = noise[i];
      x(i, 1) = static_cast<double>(i);
    }
    const auto fit = train_stump(x, y, std::vector(6, 1.0 / 6));
    CHECK(fit.stump.feature_index == 1);
    CHECK(fit.error == 0.0);
  }

  TEST_CASE("stump matches the exhaustive scan oracle") {
    auto rng = make_stream(17, Stream::Synth);
    std::uniform_int_distribution<int> grid(0, 6);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 5 + trial % 12, d = 1 + trial % 4;
      Matrix x(n, d);
      std::vector<int> y(n);
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = grid(rng) * 0.5;
        y[i] = grid(rng) % 2 ? 1 : -1;
        w[i] = u(rng);
      }
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (auto& v : w) v /= total;
      const auto fit = train_stump(x, y, w);
      const auto oracle = scan(x, y, w);
      CHECK(fit.error == doctest::Approx(oracle.error).epsilon(1e-12));
      CHECK(fit.stump.feature_index == oracle.stump.feature_index);
      CHECK(fit.stump.threshold == oracle.stump.threshold);
      CHECK(fit.stump.polarity == oracle.stump.polarity);
    }
  }

  TEST_CASE("separable data: zero training error after round one") {
    const auto x = column({0.1, 0.4, 0.35, 0.8, 0.9, 0.7});
    const std::vector<int> y{0, 0, 0, 1, 1, 1};
    std::vector<BoostRound> trace;
    const auto model = train_adaboost(x, y, 50, &trace);
    CHECK(model.stumps.size() == 1);  // stops early at zero error
    CHECK(trace.front().train_error == 0.0);
    CHECK(predict(model, x) == y);
  }

  TEST_CASE("weights stay a distribution and the bound holds") {
    auto rng = make_stream(3, Stream::Synth);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 10; ++trial) {
      Matrix x(60, 4);
      std::vector<int> y(60);
      for (std::size_t i = 0; i < 60; ++i) {
        y[i] = i % 3 == 0;
        for (std::size_t j = 0; j < 4; ++j) x(i, j) = z(rng) + (j == 0 ? 0.7 * y[i] : 0.0);
      }
      std::vector<BoostRound> trace;
      train_adaboost(x, y, 30, &trace);
      double prev = 1.0;
      for (const auto& r : trace) {
        CHECK(r.weight_sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.weight_min >= 0.0);
        CHECK(r.bound >= r.train_error);
        CHECK(r.bound <= prev + 1e-15);
        prev = r.bound;
      }
    }
  }

  TEST_CASE("training is deterministic and rejects a single class") {
    const auto x = column({1, 5, 2, 8, 3, 9, 4});
    const std::vector<int> y{0, 1, 0, 1, 1, 0, 0};
    CHECK(train_adaboost(x, y, 20) == train_adaboost(x, y, 20));
    CHECK_THROWS_AS(train_adaboost(x, std::vector(7, 1), 5), DataError);
  }

  TEST_CASE("hand-built two-stump model") {
    AdaBoostModel model;
    model.stumps = {{0, 1.5, 1, 0.8}, {1, 0.0, -1, 0.5}};
    Matrix x(3, 2);
    // x0 > 1.5 votes +1; x1 > 0 votes -1.
    x(0, 0) = 2.0, x(0, 1) = 1.0;   // 0.8 - 0.5 = 0.3
    x(1, 0) = 1.0, x(1, 1) = 1.0;   // -0.8 - 0.5 = -1.3
    x(2, 0) = 1.0, x(2, 1) = -1.0;  // -0.8 + 0.5 = -0.3
    const auto s = decision_scores(model, x);
    CHECK(s[0] == doctest::Approx(0.3));
    CHECK(s[1] == doctest::Approx(-1.3));
    CHECK(s[2] == doctest::Approx(-0.3));
    CHECK(predict(model, x) == std::vector{1, 0, 0});
  }

  TEST_CASE("score zero maps to class 1; alpha scaling and duplication") {
    AdaBoostModel model;
    model.stumps = {{0, 0.0, 1, 0.5}, {0, 0.0, -1, 0.5}};
    const auto x = column({-1.0, 1.0});
    CHECK(decision_scores(model, x) == std::vector{0.0, 0.0});
    CHECK(predict(model, x) == std::vector{1, 1});

    AdaBoostModel single;
    single.stumps = {{0, 0.0, 1, 0.5}};
    CHECK(decision_scores(single, x) == std::vector{-0.5, 0.5});
    auto doubled = single;
    doubled.stumps.push_back(single.stumps[0]);
    CHECK(decision_scores(doubled, x) == std::vector{-1.0, 1.0});

    auto trained = train_adaboost(column({1, 5, 2, 8, 3, 9, 4}), std::vector{0, 1, 0, 1, 1, 0, 0}, 10);
    auto scaled = trained;
    for (auto& st : scaled.stumps) st.alpha *= 3.7;
    const auto probe = column({0, 1.5, 2.5, 3.5, 4.5, 6, 8.5, 10});
    CHECK(predict(trained, probe) == predict(scaled, probe));
  }

  TEST_CASE("dimension mismatch is rejected") {
    auto model = train_adaboost(column({1, 2, 3, 4}), std::vector{0, 0, 1, 1}, 3);
    CHECK_THROWS(predict(model, Matrix(2, 3)));
  }

  TEST_CASE("json round trip is exact") {
    Matrix x(40, 3);
    std::vector<int> y(40);
    auto rng = make_stream(8, Stream::Synth);
    std::normal_distribution<double> z;
    for (std::size_t i = 0; i < 40; ++i) {
      y[i] = i % 2;
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = z(rng) / 3.0 + 0.3 * y[i];
    }
    const auto model = train_adaboost(x, y, 15);
    const auto back = model_from_json(model_to_json(model));
    CHECK(back.stumps == model.stumps);
    CHECK(decision_scores(back, x) == decision_scores(model, x));
  }
}
