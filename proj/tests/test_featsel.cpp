#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fwsel/featsel.hpp"

using namespace fwsel;

namespace {

Dataset synthetic(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  return generate_synthetic(spec);
}

FeatureMask mask_of(std::size_t d, std::initializer_list<std::size_t> on) {
  FeatureMask m{std::vector<std::uint8_t>(d, 0)};
  for (auto j : on) m.bits[j] = 1;
  return m;
}

SelectionConfig quick(std::uint64_t seed, std::size_t budget = 300) {
  SelectionConfig cfg;
  cfg.swarm.max_evaluations = budget;
  cfg.swarm.seed = seed;
  cfg.split_seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("featsel") {
  TEST_CASE("discretization threshold") {
    CHECK(discretize(std::vector{0.49, 0.5, 0.51}).bits == std::vector<std::uint8_t>{0, 1, 1});
    CHECK(discretize(std::vector(6, 0.0)).count() == 0);
    CHECK(discretize(std::vector(6, 1.0)).count() == 6);
  }

  TEST_CASE("lambda is the ceiling of the fraction") {
    CHECK(lambda_count(0.2, 25) == 5);
    CHECK(lambda_count(0.2, 10) == 2);
    CHECK(lambda_count(0.2, 11) == 3);
    CHECK(lambda_count(0.2, 768) == 154);
    CHECK(lambda_count(0.01, 3) == 1);
  }

  TEST_CASE("repair") {
    auto rng = make_stream(1, Stream::Repair);
    auto ok = mask_of(10, {1, 4, 7});
    const auto before = ok;
    repair(ok, 3, rng);
    CHECK(ok == before);

    FeatureMask zero{std::vector<std::uint8_t>(10, 0)};
    repair(zero, 3, rng);
    CHECK(zero.count() == 3);

    for (int t = 0; t < 200; ++t) {
      FeatureMask m{std::vector<std::uint8_t>(12)};
      for (auto& b : m.bits) b = rng() % 4 == 0;
      const auto orig = m;
      repair(m, 6, rng);
      CHECK(m.count() >= 6);
      for (std::size_t j = 0; j < m.size(); ++j)
        if (orig.bits[j]) CHECK(m.bits[j] == 1);
    }
  }

  TEST_CASE("separable data with informative columns scores loss -6") {
    SynthSpec spec;
    spec.noise_sigma = 0.0;
    spec.seed = 2;
    const auto ds = generate_synthetic(spec);
    const auto split = stratified_split(ds, 0.3, 2);
    const auto out = fitness(mask_of(25, {0, 1, 2, 3, 4}), split, 50, 5);
    CHECK(out.loss == doctest::Approx(-6.0).epsilon(1e-9));
    CHECK(out.loss == -out.metrics.sum());
  }

  TEST_CASE("loss range and the lambda guard") {
    const auto ds = synthetic(4);
    const auto split = stratified_split(ds, 0.3, 4);
    for (auto m : {mask_of(25, {5, 6, 7, 8, 9}), mask_of(25, {0, 10, 20, 21, 22, 23})}) {
      const auto out = fitness(m, split, 20, 5);
      CHECK(out.loss >= -6.0);
      CHECK(out.loss <= 0.0);
    }
    CHECK_THROWS_AS(fitness(mask_of(25, {1, 2}), split, 20, 5), InvariantError);
    CHECK_THROWS_AS(fitness(FeatureMask{std::vector<std::uint8_t>(25, 0)}, split, 20, 0), InvariantError);
  }

  TEST_CASE("informative mask beats noise mask on every seed") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto ds = synthetic(seed);
      const auto split = stratified_split(ds, 0.3, seed);
      const auto inf = fitness(mask_of(25, {0, 1, 2, 3, 4}), split, 50, 5);
      const auto noise = fitness(mask_of(25, {5, 6, 7, 8, 9}), split, 50, 5);
      CAPTURE(seed);
      CHECK(inf.loss < noise.loss);
    }
  }

  TEST_CASE("importance bookkeeping") {
    ImportanceTracker t(4);
    CHECK(t.counts() == std::vector<std::size_t>(4, 0));
    t.record(FeatureMask::all(4));
    CHECK(t.counts() == std::vector<std::size_t>(4, 1));
    t.record(mask_of(4, {2}));
    t.record(mask_of(4, {0, 2}));
    CHECK(t.evaluations() == 3);
    CHECK(std::accumulate(t.counts().begin(), t.counts().end(), std::size_t{0}) == 4 + 1 + 2);
    CHECK_THROWS(t.record(FeatureMask::all(3)));
    ImportanceTracker u(4);
    u.record(mask_of(4, {3}));
    auto a = t, b = u;
    a.merge(u);
    b.merge(t);
    CHECK(a.counts() == b.counts());
    CHECK(a.evaluations() == 4);
  }

  TEST_CASE("select_features contract") {
    const auto ds = synthetic(7);
    const auto cfg = quick(7);
    const auto r = select_features(ds, cfg);
    CHECK(r.evaluations == cfg.swarm.max_evaluations);
    CHECK(r.lambda == 5);
    CHECK(r.min_selected >= 5);
    CHECK(r.best_mask.count() >= 5);
    CHECK(r.loss == -r.best_metrics.sum());
    CHECK(r.importance.size() == 25);
    for (auto c : r.importance) CHECK(c <= r.evaluations);
    CHECK(r.model.stumps.size() >= 1);
    for (const auto& s : r.model.stumps) CHECK(s.feature_index < r.best_mask.count());
    const auto again = select_features(ds, cfg);
    CHECK(again.best_mask == r.best_mask);
    CHECK(again.loss == r.loss);
    CHECK(again.importance == r.importance);
    CHECK(again.fitness_trace == r.fitness_trace);
  }

  TEST_CASE("selection is identical with 1 and 4 threads") {
    const auto ds = synthetic(9);
    auto cfg = quick(9, 200);
    const auto a = select_features(ds, cfg);
    cfg.swarm.threads = 4;
    const auto b = select_features(ds, cfg);
    CHECK(a.best_mask == b.best_mask);
    CHECK(a.importance == b.importance);
    CHECK(a.fitness_trace == b.fitness_trace);
    CHECK(a.model == b.model);
  }

  TEST_CASE("every optimizer can drive the wrapper") {
    const auto ds = synthetic(10);
    for (auto algo : {Algorithm::Fa, Algorithm::Pso, Algorithm::Ba}) {
      auto cfg = quick(10, 150);
      cfg.swarm.algorithm = algo;
      const auto r = select_features(ds, cfg);
      CHECK(r.evaluations == 150);
      CHECK(r.min_selected >= 5);
    }
  }

  TEST_CASE("repeated splits and holdout") {
    const auto ds = synthetic(12);
    auto cfg = quick(12, 100);
    cfg.split_repeats = 3;
    cfg.holdout_fraction = 0.2;
    const auto splits = make_selection_splits(ds, cfg);
    CHECK(splits.search.size() == 3);
    REQUIRE(splits.holdout.has_value());
    CHECK(splits.holdout->test.rows() + splits.search[0].train.rows() + splits.search[0].test.rows() == ds.rows());
    const auto r = select_features(ds, cfg);
    CHECK(r.holdout_metrics.has_value());
    const auto single = fitness(r.best_mask, splits.search, cfg.rounds, r.lambda);
    CHECK(single.loss == r.loss);
  }

  TEST_CASE("evaluate_mask of all features") {
    const auto ds = synthetic(13);
    const auto r = evaluate_mask(ds, FeatureMask::all(25), quick(13));
    CHECK(r.loss == -r.best_metrics.sum());
    CHECK(r.evaluations == 1);
  }

  TEST_CASE("skb") {
    const auto ds = synthetic(14);
    CHECK(skb(ds, 25) == FeatureMask::all(25));
    std::vector<double> overlaps;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto m = skb(synthetic(seed), 5);
      CHECK(m.count() == 5);
      double o = 0;
      for (std::size_t j = 0; j < 5; ++j) o += m.bits[j];
      overlaps.push_back(o);
    }
    std::sort(overlaps.begin(), overlaps.end());
    CHECK(overlaps[2] >= 4.0);
  }

  TEST_CASE("anova ranks a perfectly separating column first") {
    Dataset ds;
    ds.features = Matrix(6, 3);
    ds.labels = {0, 0, 0, 1, 1, 1};
    ds.feature_names = {"a", "b", "c"};
    const double a[] = {1, 2, 3, 4, 5, 6};        // separating but with spread
    const double b[] = {0, 0, 0, 1, 1, 1};        // separating, zero within-class spread
    for (std::size_t i = 0; i < 6; ++i) {
      ds.features(i, 0) = a[i];
      ds.features(i, 1) = b[i];
      ds.features(i, 2) = 7.0;
    }
    const auto f = anova_f(ds);
    // a: group means 2 and 5, SSB = 6 * 2.25 = 13.5, SSW = 4, F = 13.5 / (4 / 4) = 13.5
    CHECK(f[0] == doctest::Approx(13.5));
    CHECK(std::isinf(f[1]));
    CHECK(f[2] == 0.0);
    CHECK(skb(ds, 1) == mask_of(3, {1}));
  }
}
