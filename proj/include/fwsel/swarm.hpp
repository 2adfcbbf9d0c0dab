#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fwsel/rng.hpp"

namespace fwsel {

enum class Algorithm { Ifa, Fa, Pso, Ba };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct PsoParams {
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp = 0.5;
};

struct BatParams {
  double f_min = 0.0;
  double f_max = 2.0;
  double loudness = 1.0;
  double loudness_decay = 0.9;
  double pulse_rate = 0.5;
  double pulse_gamma = 0.9;
  double walk_scale = 0.05;  // local walk step, as a fraction of the unit cube
};

struct SwarmConfig {
  Algorithm algorithm = Algorithm::Ifa;
  std::size_t dimension = 10;
  std::size_t population = 10;
  std::size_t s_max = 20;
  std::size_t s_min = 1;
  double r_max = 0.4;
  double epsilon = 1e-12;
  std::size_t gaussian_sparks = 5;
  std::size_t max_evaluations = 20000;
  std::size_t max_generations = 0;  // 0: bounded by the evaluation budget only
  std::uint64_t seed = 0;
  unsigned threads = 1;  // evaluation workers; never changes results
  PsoParams pso;
  BatParams bat;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Firework {
  std::vector<double> x;
  double fitness = 0.0;
  std::vector<double> pbest;
  double pbest_fitness = 0.0;
};

/// Explosion radius of one firework: a scalar amplitude, or (for fireworks
/// holding the population-maximum spark count under IFA) sparks drawn around
/// the core firework as x_core * (1 + N(0,1)) per dimension.
struct Radius {
  bool around_core = false;
  double scalar = 0.0;
};

struct OptResult {
  std::vector<double> best_x;
  double best_fitness = 0.0;
  std::size_t evaluations_used = 0;
  std::size_t generations = 0;
  std::vector<double> fitness_trace;             // best-so-far after each generation
  std::vector<std::vector<double>> pbest_trace;  // per generation, per slot (IFA/FA)
};

using Objective = std::function<double(std::span<const double>)>;
// Evaluates every candidate; result i belongs to candidate i.
using BatchObjective = std::function<std::vector<double>(const std::vector<std::vector<double>>&)>;

std::vector<std::size_t> spark_counts(std::span<const double> fitness, const SwarmConfig& cfg);

// Canonical amplitude from current fitness.
std::vector<Radius> fa_radius(std::span<const Firework> population, const SwarmConfig& cfg);
// Amplitude from personal-best history; fireworks tied at the maximum spark
// count explode around the core firework instead.
std::vector<Radius> ifa_radius(std::span<const Firework> population, std::span<const std::size_t> counts,
                               const SwarmConfig& cfg);

// Replaces pbest iff the current fitness is strictly smaller. Returns true on replacement.
bool update_pbest(Firework& fw);

// Redraws out-of-range coordinates uniformly in [0, 1].
void map_to_bounds(std::vector<double>& x, Rng& rng);

// Uniformly chosen nonempty subset of {0..d-1}, as a membership mask.
std::vector<bool> choose_dimensions(std::size_t d, Rng& rng);

std::vector<std::vector<double>> explode(std::span<const double> x, double radius, std::size_t count, Rng& rng);
std::vector<double> explode_around_core(std::span<const double> x, std::span<const double> core, Rng& rng);
std::vector<double> gaussian_mutate(std::span<const double> x, Rng& rng);

// Indices of the next generation: the best candidate (lowest index on ties)
// first, then n-1 others drawn uniformly without replacement.
std::vector<std::size_t> select_next(std::span<const double> fitness, std::size_t n, Rng& rng);

OptResult optimize(const Objective& objective, const SwarmConfig& cfg);
OptResult optimize_batch(const BatchObjective& objective, const SwarmConfig& cfg);

// Benchmarks evaluated directly on the unit cube; both have their global
// minimum 0 at the origin. On [0,1]^d Rastrigin keeps a local minimum at every
// vertex of the cube.
double sphere(std::span<const double> x);
double rastrigin(std::span<const double> x);
// Rastrigin on its usual [-5.12, 5.12]^d box, rescaled onto the unit cube
// (minimum at the centre).
double rastrigin_centered(std::span<const double> x);

}  // namespace fwsel
