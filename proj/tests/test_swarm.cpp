#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include "fwsel/swarm.hpp"

using namespace fwsel;

namespace {

Firework with_pbest(double f) {
  return {{0.5}, f, {0.5}, f};
}

}  // namespace

TEST_SUITE("swarm") {
  TEST_CASE("spark counts") {
    SwarmConfig cfg;
    cfg.s_max = 10;
    cfg.s_min = 1;
    const auto two = spark_counts(std::vector{0.0, 1.0}, cfg);
    CHECK(two == std::vector<std::size_t>{10, 1});
    const auto same = spark_counts(std::vector{3.0, 3.0, 3.0}, cfg);
    CHECK(same[0] == same[1]);
    CHECK(same[1] == same[2]);
    const auto mixed = spark_counts(std::vector{0.2, 5.0, 1.0, 0.1}, cfg);
    CHECK(mixed[1] == cfg.s_min);  // worst
    CHECK(mixed[3] == *std::max_element(mixed.begin(), mixed.end()));  // best
  }

  TEST_CASE("ifa radius with equal personal bests is r_max everywhere") {
    SwarmConfig cfg;
    std::vector<Firework> pop(5, with_pbest(2.5));
    const auto r = ifa_radius(pop, std::vector<std::size_t>{3, 3, 3, 3, 3}, cfg);
    for (const auto& ri : r) CHECK(ri.scalar == doctest::Approx(cfg.r_max).epsilon(1e-12));
  }

  TEST_CASE("ifa radius plug-in example [1,2,5]") {
    SwarmConfig cfg;
    cfg.r_max = 0.4;
    std::vector<Firework> pop{with_pbest(1), with_pbest(2), with_pbest(5)};
    const std::vector<std::size_t> counts{20, 7, 1};
    const auto r = ifa_radius(pop, counts, cfg);
    CHECK(r[0].scalar == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r[1].scalar == doctest::Approx(0.08).epsilon(1e-9));
    CHECK(r[2].scalar == doctest::Approx(0.32).epsilon(1e-9));
    CHECK(r[0].around_core);
    CHECK_FALSE(r[1].around_core);
    CHECK_FALSE(r[2].around_core);
  }

  TEST_CASE("ifa radius reads personal bests, fa radius reads current fitness") {
    SwarmConfig cfg;
    std::vector<Firework> pop{{{0.1}, 9.0, {0.1}, 1.0}, {{0.2}, 1.0, {0.2}, 4.0}, {{0.3}, 5.0, {0.3}, 3.0}};
    const std::vector<std::size_t> counts{1, 2, 1};
    const auto ifa = ifa_radius(pop, counts, cfg);
    const auto fa = fa_radius(pop, cfg);
    // smallest among the scalar group goes to the best pbest
    CHECK(ifa[0].scalar < ifa[2].scalar);
    CHECK(fa[1].scalar < fa[2].scalar);
    CHECK(fa[2].scalar < fa[0].scalar);
    double sum = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(ifa[i].scalar > 0.0);
      CHECK(ifa[i].scalar <= cfg.r_max);
      sum += ifa[i].scalar;
    }
    CHECK(sum <= cfg.r_max * (1.0 + 1e-9));
  }

  TEST_CASE("update_pbest is strict") {
    Firework fw{{0.3}, 1.0, {0.9}, 2.0};
    CHECK(update_pbest(fw));
    CHECK(fw.pbest == std::vector{0.3});
    CHECK(fw.pbest_fitness == 1.0);
    Firework tie{{0.3}, 2.0, {0.9}, 2.0};
    CHECK_FALSE(update_pbest(tie));
    CHECK(tie.pbest == std::vector{0.9});
  }

  TEST_CASE("explode") {
    const std::vector<double> x{0.5, 0.5, 0.5, 0.5};
    auto rng = make_stream(1, Stream::Explode);
    for (const auto& s : explode(x, 0.0, 5, rng)) CHECK(s == x);
    for (const auto& s : explode(x, 0.3, 200, rng))
      for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(s[k] - x[k]) <= 0.3);
    auto a = make_stream(7, Stream::Explode, {1, 2});
    auto b = make_stream(7, Stream::Explode, {1, 2});
    CHECK(explode(x, 0.9, 10, a) == explode(x, 0.9, 10, b));
  }

  TEST_CASE("choose_dimensions never returns the empty set") {
    auto rng = make_stream(2, Stream::Explode);
    for (int i = 0; i < 500; ++i) {
      const auto dims = choose_dimensions(2, rng);
      CHECK((dims[0] || dims[1]));
    }
  }

  TEST_CASE("gaussian mutation") {
    auto rng = make_stream(3, Stream::Gaussian);
    for (int i = 0; i < 50; ++i) CHECK(gaussian_mutate(std::vector(5, 0.0), rng) == std::vector(5, 0.0));

    const std::size_t n = 10000;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = gaussian_mutate(std::vector{0.5}, rng)[0];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0;
    for (double t : v) var += (t - mean) * (t - mean);
    const double sigma = std::sqrt(var / (n - 1));
    CHECK(std::abs(mean - 0.5) <= 3.0 * sigma / std::sqrt(static_cast<double>(n)));
    for (double t : v) CHECK((t >= 0.0 && t <= 1.0));
  }

  TEST_CASE("map_to_bounds") {
    auto rng = make_stream(4, Stream::Explode);
    std::vector<double> in{0.0, 0.3, 1.0};
    map_to_bounds(in, rng);
    CHECK(in == std::vector{0.0, 0.3, 1.0});
    std::vector<double> out{1.5, 0.2, -0.1};
    auto replay = out;
    auto r1 = make_stream(9, Stream::Explode);
    auto r2 = make_stream(9, Stream::Explode);
    map_to_bounds(out, r1);
    map_to_bounds(replay, r2);
    CHECK(out == replay);
    CHECK((out[0] >= 0.0 && out[0] <= 1.0));
    CHECK(out[1] == 0.2);
    CHECK((out[2] >= 0.0 && out[2] <= 1.0));
  }

  TEST_CASE("select_next keeps the best and draws the rest uniformly") {
    auto rng = make_stream(5, Stream::Select);
    const std::vector<double> f{4, 3, 7, 0.5, 9, 2, 8, 6, 5, 1};
    CHECK(select_next(f, 1, rng) == std::vector<std::size_t>{3});
    std::vector<double> hits(f.size(), 0.0);
    const int trials = 9000;
    for (int t = 0; t < trials; ++t) {
      const auto pick = select_next(f, 4, rng);
      CHECK(pick[0] == 3);
      for (std::size_t k = 1; k < pick.size(); ++k) hits[pick[k]] += 1.0;
    }
    const double expected = trials * 3.0 / 9.0;
    double chi2 = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (i != 3) chi2 += (hits[i] - expected) * (hits[i] - expected) / expected;
    CHECK(chi2 < 20.09);  // chi-square, 8 dof, p = 0.01
  }

  TEST_CASE("ties in select_next go to the lowest index") {
    auto rng = make_stream(6, Stream::Select);
    CHECK(select_next(std::vector{2.0, 1.0, 1.0}, 1, rng)[0] == 1);
  }

  TEST_CASE("ifa on sphere reaches 1e-2 within 20000 evaluations") {
    SwarmConfig cfg;
    cfg.seed = 1;
    const auto r = optimize([](std::span<const double> x) { return sphere(x); }, cfg);
    CHECK(r.best_fitness <= 1e-2);
    CHECK(r.evaluations_used == cfg.max_evaluations);
    CHECK(r.best_fitness == sphere(r.best_x));
  }

  TEST_CASE("constant objective") {
    for (auto algo : {Algorithm::Ifa, Algorithm::Fa, Algorithm::Pso, Algorithm::Ba}) {
      SwarmConfig cfg;
      cfg.algorithm = algo;
      cfg.max_evaluations = 300;
      const auto r = optimize([](std::span<const double>) { return 4.25; }, cfg);
      CHECK(r.best_fitness == 4.25);
      CHECK(r.best_x.size() == cfg.dimension);
    }
  }

  TEST_CASE("budget accounting and monotone traces for every algorithm") {
    for (auto algo : {Algorithm::Ifa, Algorithm::Fa, Algorithm::Pso, Algorithm::Ba}) {
      SwarmConfig cfg;
      cfg.algorithm = algo;
      cfg.max_evaluations = 1234;
      cfg.seed = 11;
      std::atomic<std::size_t> calls{0};
      double min_seen = INFINITY;
      const auto r = optimize(
          [&](std::span<const double> x) {
            ++calls;
            const double v = rastrigin(x);
            min_seen = std::min(min_seen, v);
            return v;
          },
          cfg);
      CAPTURE(to_string(algo));
      CHECK(r.evaluations_used == calls.load());
      CHECK(r.evaluations_used <= cfg.max_evaluations);
      CHECK(r.best_fitness == min_seen);
      for (std::size_t g = 1; g < r.fitness_trace.size(); ++g) CHECK(r.fitness_trace[g] <= r.fitness_trace[g - 1]);
      for (std::size_t g = 1; g < r.pbest_trace.size(); ++g)
        for (std::size_t i = 0; i < r.pbest_trace[g].size(); ++i) CHECK(r.pbest_trace[g][i] <= r.pbest_trace[g - 1][i]);
    }
  }

  TEST_CASE("generation cap") {
    SwarmConfig cfg;
    cfg.max_generations = 7;
    const auto r = optimize([](std::span<const double> x) { return sphere(x); }, cfg);
    CHECK(r.generations == 7);
    CHECK(r.fitness_trace.size() == 7);
  }

  TEST_CASE("results do not depend on the worker count") {
    for (auto algo : {Algorithm::Ifa, Algorithm::Fa, Algorithm::Pso, Algorithm::Ba}) {
      SwarmConfig cfg;
      cfg.algorithm = algo;
      cfg.max_evaluations = 2000;
      cfg.seed = 21;
      const auto serial = optimize([](std::span<const double> x) { return rastrigin_centered(x); }, cfg);
      cfg.threads = 8;
      const auto parallel = optimize([](std::span<const double> x) { return rastrigin_centered(x); }, cfg);
      CHECK(serial.best_x == parallel.best_x);
      CHECK(serial.fitness_trace == parallel.fitness_trace);
      CHECK(serial.evaluations_used == parallel.evaluations_used);
    }
  }

  TEST_CASE("config validation and names") {
    SwarmConfig cfg;
    cfg.population = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.r_max = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    for (auto a : {Algorithm::Ifa, Algorithm::Fa, Algorithm::Pso, Algorithm::Ba})
      CHECK(algorithm_from_string(to_string(a)) == a);
    CHECK_THROWS(algorithm_from_string("ga"));
  }

  TEST_CASE("benchmark functions") {
    CHECK(sphere(std::vector(4, 0.0)) == 0.0);
    CHECK(rastrigin(std::vector(4, 0.0)) == 0.0);
    CHECK(rastrigin_centered(std::vector(4, 0.5)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sphere(std::vector{0.5, 1.0}) == 1.25);
  }
}
