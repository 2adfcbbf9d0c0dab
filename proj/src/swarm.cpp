#include "fwsel/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fwsel/common.hpp"
#include "fwsel/parallel.hpp"

namespace fwsel {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ifa: return "ifa";
    case Algorithm::Fa: return "fa";
    case Algorithm::Pso: return "pso";
    case Algorithm::Ba: return "ba";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "ifa") return Algorithm::Ifa;
  if (name == "fa") return Algorithm::Fa;
  if (name == "pso") return Algorithm::Pso;
  if (name == "ba") return Algorithm::Ba;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected ifa, fa, pso or ba)");
}

void SwarmConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("swarm." + what); };
  if (dimension < 1) fail("dimension: must be >= 1");
  if (population < 2) fail("population: must be >= 2");
  if (s_min < 1) fail("s_min: must be >= 1");
  if (s_max < s_min) fail("s_max: must be >= s_min");
  if (!(r_max > 0.0 && r_max <= 1.0)) fail("r_max: must be in (0, 1]");
  if (!(epsilon > 0.0)) fail("epsilon: must be > 0");
  if (max_evaluations < 1) fail("max_evaluations: must be >= 1");
  if (!(pso.velocity_clamp > 0.0)) fail("pso.velocity_clamp: must be > 0");
  if (!(bat.f_max >= bat.f_min)) fail("bat.f_max: must be >= bat.f_min");
  if (!(bat.loudness_decay > 0.0 && bat.loudness_decay <= 1.0)) fail("bat.loudness_decay: must be in (0, 1]");
}

std::vector<std::size_t> spark_counts(std::span<const double> fitness, const SwarmConfig& cfg) {
  const double worst = *std::max_element(fitness.begin(), fitness.end());
  double denom = 0;
  for (double f : fitness) denom += worst - f;
  denom += cfg.epsilon;
  std::vector<std::size_t> counts(fitness.size());
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    const double share = (worst - fitness[i] + cfg.epsilon) / denom;
    const double raw = std::round(static_cast<double>(cfg.s_max) * share);
    counts[i] = std::clamp(static_cast<std::size_t>(std::max(raw, 0.0)), cfg.s_min, cfg.s_max);
  }
  return counts;
}

namespace {

std::vector<Radius> scaled_radius(std::span<const double> values, const SwarmConfig& cfg) {
  const double best = *std::min_element(values.begin(), values.end());
  double denom = 0;
  for (double v : values) denom += v - best;
  denom += cfg.epsilon;
  std::vector<Radius> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i].scalar = cfg.r_max * (values[i] - best + cfg.epsilon) / denom;
  return out;
}

std::size_t argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

std::vector<Radius> fa_radius(std::span<const Firework> population, const SwarmConfig& cfg) {
  std::vector<double> f;
  for (const auto& fw : population) f.push_back(fw.fitness);
  return scaled_radius(f, cfg);
}

std::vector<Radius> ifa_radius(std::span<const Firework> population, std::span<const std::size_t> counts,
                               const SwarmConfig& cfg) {
  std::vector<double> pbest;
  for (const auto& fw : population) pbest.push_back(fw.pbest_fitness);
  auto radii = scaled_radius(pbest, cfg);
  const std::size_t top = *std::max_element(counts.begin(), counts.end());
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (counts[i] == top) radii[i].around_core = true;
  return radii;
}

bool update_pbest(Firework& fw) {
  if (fw.fitness < fw.pbest_fitness) {
    fw.pbest = fw.x;
    fw.pbest_fitness = fw.fitness;
    return true;
  }
  return false;
}

void map_to_bounds(std::vector<double>& x, Rng& rng) {
  for (auto& v : x)
    if (!(v >= 0.0 && v <= 1.0)) v = uniform01(rng);
}

std::vector<bool> choose_dimensions(std::size_t d, Rng& rng) {
  std::vector<bool> chosen(d);
  std::bernoulli_distribution coin(0.5);
  bool any = false;
  while (!any) {
    for (std::size_t k = 0; k < d; ++k) {
      chosen[k] = coin(rng);
      any = any || chosen[k];
    }
  }
  return chosen;
}

std::vector<std::vector<double>> explode(std::span<const double> x, double radius, std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  std::vector<std::vector<double>> sparks;
  sparks.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<double> spark(x.begin(), x.end());
    auto dims = choose_dimensions(x.size(), rng);
    for (std::size_t k = 0; k < spark.size(); ++k)
      if (dims[k]) spark[k] += radius * shift(rng);
    map_to_bounds(spark, rng);
    sparks.push_back(std::move(spark));
  }
  return sparks;
}

std::vector<double> explode_around_core(std::span<const double> x, std::span<const double> core, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> spark(x.begin(), x.end());
  auto dims = choose_dimensions(x.size(), rng);
  for (std::size_t k = 0; k < spark.size(); ++k)
    if (dims[k]) spark[k] = core[k] * (1.0 + gauss(rng));
  map_to_bounds(spark, rng);
  return spark;
}

std::vector<double> gaussian_mutate(std::span<const double> x, Rng& rng) {
  std::vector<double> spark(x.begin(), x.end());
  auto dims = choose_dimensions(x.size(), rng);
  const double g = std::normal_distribution<double>(1.0, 1.0)(rng);
  for (std::size_t k = 0; k < spark.size(); ++k)
    if (dims[k]) spark[k] *= g;
  map_to_bounds(spark, rng);
  return spark;
}

std::vector<std::size_t> select_next(std::span<const double> fitness, std::size_t n, Rng& rng) {
  if (fitness.size() < n || n == 0) throw std::invalid_argument("select_next: need at least n candidates");
  const std::size_t best = argmin(fitness);
  std::vector<std::size_t> rest;
  rest.reserve(fitness.size() - 1);
  for (std::size_t i = 0; i < fitness.size(); ++i)
    if (i != best) rest.push_back(i);
  std::vector<std::size_t> chosen{best};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, rest.size() - 1);
    std::swap(rest[k], rest[pick(rng)]);
    chosen.push_back(rest[k]);
  }
  return chosen;
}

namespace {

class Tracker {
 public:
  Tracker(const BatchObjective& objective, const SwarmConfig& cfg) : objective_(objective), cfg_(cfg) {
    result_.best_fitness = std::numeric_limits<double>::infinity();
  }

  std::size_t remaining() const { return cfg_.max_evaluations - result_.evaluations_used; }
  bool exhausted() const {
    return remaining() == 0 || (cfg_.max_generations != 0 && result_.generations >= cfg_.max_generations);
  }

  // Evaluates as many candidates as the budget allows and drops the rest.
  std::vector<double> evaluate(std::vector<std::vector<double>>& candidates) {
    if (candidates.size() > remaining()) candidates.resize(remaining());
    if (candidates.empty()) return {};
    auto values = objective_(candidates);
    if (values.size() != candidates.size()) throw InvariantError("objective returned wrong result count");
    result_.evaluations_used += candidates.size();
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] < result_.best_fitness) {
        result_.best_fitness = values[i];
        result_.best_x = candidates[i];
      }
    return values;
  }

  void end_generation() {
    ++result_.generations;
    result_.fitness_trace.push_back(result_.best_fitness);
  }

  OptResult& result() { return result_; }

 private:
  const BatchObjective& objective_;
  const SwarmConfig& cfg_;
  OptResult result_;
};

std::vector<std::vector<double>> random_population(const SwarmConfig& cfg) {
  std::vector<std::vector<double>> xs(cfg.population, std::vector<double>(cfg.dimension));
  for (std::size_t i = 0; i < cfg.population; ++i) {
    auto rng = make_stream(cfg.seed, Stream::Init, {i});
    for (auto& v : xs[i]) v = uniform01(rng);
  }
  return xs;
}

OptResult run_fireworks(const BatchObjective& objective, const SwarmConfig& cfg) {
  Tracker tracker(objective, cfg);
  auto xs = random_population(cfg);
  auto fs = tracker.evaluate(xs);
  std::vector<Firework> pop;
  for (std::size_t i = 0; i < xs.size(); ++i) pop.push_back({xs[i], fs[i], xs[i], fs[i]});
  if (pop.size() < cfg.population) return tracker.result();

  for (std::uint64_t gen = 0; !tracker.exhausted(); ++gen) {
    std::vector<double> fitness;
    for (const auto& fw : pop) fitness.push_back(fw.fitness);
    const auto counts = spark_counts(fitness, cfg);
    const auto radii = cfg.algorithm == Algorithm::Ifa ? ifa_radius(pop, counts, cfg) : fa_radius(pop, cfg);
    const auto& core = pop[argmin(fitness)].x;

    std::vector<std::vector<double>> sparks;
    for (std::size_t i = 0; i < pop.size(); ++i)
      for (std::size_t j = 0; j < counts[i]; ++j) {
        auto rng = make_stream(cfg.seed, Stream::Explode, {gen, i, j});
        if (radii[i].around_core)
          sparks.push_back(explode_around_core(pop[i].x, core, rng));
        else
          sparks.push_back(std::move(explode(pop[i].x, radii[i].scalar, 1, rng).front()));
      }
    for (std::size_t g = 0; g < cfg.gaussian_sparks; ++g) {
      auto rng = make_stream(cfg.seed, Stream::Gaussian, {gen, g});
      const auto parent = std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng);
      sparks.push_back(gaussian_mutate(pop[parent].x, rng));
    }
    const auto spark_fitness = tracker.evaluate(sparks);

    std::vector<double> pool_fitness = fitness;
    pool_fitness.insert(pool_fitness.end(), spark_fitness.begin(), spark_fitness.end());
    auto rng = make_stream(cfg.seed, Stream::Select, {gen});
    const auto chosen = select_next(pool_fitness, pop.size(), rng);

    std::vector<Firework> next = pop;
    for (std::size_t slot = 0; slot < chosen.size(); ++slot) {
      const std::size_t c = chosen[slot];
      next[slot].x = c < pop.size() ? pop[c].x : sparks[c - pop.size()];
      next[slot].fitness = pool_fitness[c];
      update_pbest(next[slot]);
    }
    pop = std::move(next);

    std::vector<double> pbests;
    for (const auto& fw : pop) pbests.push_back(fw.pbest_fitness);
    tracker.result().pbest_trace.push_back(std::move(pbests));
    tracker.end_generation();
  }
  return tracker.result();
}

OptResult run_pso(const BatchObjective& objective, const SwarmConfig& cfg) {
  Tracker tracker(objective, cfg);
  const auto& p = cfg.pso;
  auto xs = random_population(cfg);
  auto fs = tracker.evaluate(xs);
  if (xs.size() < cfg.population) return tracker.result();
  std::vector<std::vector<double>> vel(xs.size(), std::vector<double>(cfg.dimension, 0.0));
  auto pbest = xs;
  auto pbest_f = fs;
  std::size_t g = argmin(pbest_f);
  std::vector<double> gbest = pbest[g];

  for (std::uint64_t iter = 0; !tracker.exhausted(); ++iter) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto rng = make_stream(cfg.seed, Stream::Pso, {iter, i});
      for (std::size_t k = 0; k < cfg.dimension; ++k) {
        const double r1 = uniform01(rng), r2 = uniform01(rng);
        double v = p.inertia * vel[i][k] + p.cognitive * r1 * (pbest[i][k] - xs[i][k]) +
                   p.social * r2 * (gbest[k] - xs[i][k]);
        v = std::clamp(v, -p.velocity_clamp, p.velocity_clamp);
        vel[i][k] = v;
        xs[i][k] = std::clamp(xs[i][k] + v, 0.0, 1.0);
      }
    }
    auto batch = xs;
    const auto values = tracker.evaluate(batch);
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] < pbest_f[i]) {
        pbest_f[i] = values[i];
        pbest[i] = xs[i];
      }
    g = argmin(pbest_f);
    gbest = pbest[g];
    tracker.end_generation();
  }
  return tracker.result();
}

OptResult run_bat(const BatchObjective& objective, const SwarmConfig& cfg) {
  Tracker tracker(objective, cfg);
  const auto& b = cfg.bat;
  auto xs = random_population(cfg);
  auto fs = tracker.evaluate(xs);
  if (xs.size() < cfg.population) return tracker.result();
  const std::size_t n = xs.size(), d = cfg.dimension;
  std::vector<std::vector<double>> vel(n, std::vector<double>(d, 0.0));
  std::vector<double> loud(n, b.loudness), pulse(n, 0.0);
  std::vector<double> best = xs[argmin(fs)];

  for (std::uint64_t t = 1; !tracker.exhausted(); ++t) {
    const double mean_loud = std::accumulate(loud.begin(), loud.end(), 0.0) / static_cast<double>(n);
    std::vector<std::vector<double>> cand(n, std::vector<double>(d));
    std::vector<double> accept_draw(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = make_stream(cfg.seed, Stream::Bat, {t, i});
      const double freq = b.f_min + (b.f_max - b.f_min) * uniform01(rng);
      for (std::size_t k = 0; k < d; ++k) {
        vel[i][k] += (xs[i][k] - best[k]) * freq;
        cand[i][k] = xs[i][k] + vel[i][k];
      }
      if (uniform01(rng) > pulse[i]) {
        std::uniform_real_distribution<double> walk(-1.0, 1.0);
        for (std::size_t k = 0; k < d; ++k) cand[i][k] = best[k] + b.walk_scale * mean_loud * walk(rng);
      }
      for (auto& v : cand[i]) v = std::clamp(v, 0.0, 1.0);
      accept_draw[i] = uniform01(rng);
    }
    const auto values = tracker.evaluate(cand);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (accept_draw[i] < loud[i] && values[i] <= fs[i]) {
        xs[i] = cand[i];
        fs[i] = values[i];
        loud[i] *= b.loudness_decay;
        pulse[i] = b.pulse_rate * (1.0 - std::exp(-b.pulse_gamma * static_cast<double>(t)));
      }
    }
    best = tracker.result().best_x;
    tracker.end_generation();
  }
  return tracker.result();
}

}  // namespace

OptResult optimize_batch(const BatchObjective& objective, const SwarmConfig& cfg) {
  cfg.validate();
  switch (cfg.algorithm) {
    case Algorithm::Ifa:
    case Algorithm::Fa: return run_fireworks(objective, cfg);
    case Algorithm::Pso: return run_pso(objective, cfg);
    case Algorithm::Ba: return run_bat(objective, cfg);
  }
  throw std::invalid_argument("optimize: unknown algorithm");
}

OptResult optimize(const Objective& objective, const SwarmConfig& cfg) {
  BatchObjective batch = [&](const std::vector<std::vector<double>>& xs) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), cfg.threads, [&](std::size_t i) { out[i] = objective(xs[i]); });
    return out;
  };
  return optimize_batch(batch, cfg);
}

double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

double rastrigin_centered(std::span<const double> x) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = 5.12 * (2.0 * x[i] - 1.0);
  return rastrigin(z);
}

}  // namespace fwsel
