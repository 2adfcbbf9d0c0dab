#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace fwsel {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator so the standard
/// <random> distributions can draw from it. Construction is a few arithmetic
/// operations, which makes one stream per (generation, firework, spark) cheap.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += kGolden); }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

 private:
  std::uint64_t state_;
};

// Stream purposes keep draws for different operators from colliding.
enum class Stream : std::uint64_t {
  Init = 1,
  Explode = 2,
  Gaussian = 3,
  Select = 4,
  Pso = 5,
  Bat = 6,
  Repair = 7,
  Split = 8,
  Synth = 9,
  Video = 10,
};

/// Independent generator keyed by a seed and a tuple of counters, e.g.
/// (generation, firework, spark). Equal keys give equal streams regardless of
/// creation order, so parallel evaluation cannot reorder draws.
inline Rng make_stream(std::uint64_t seed, Stream purpose, std::initializer_list<std::uint64_t> counters = {}) {
  std::uint64_t h = Rng::mix(seed + Rng::kGolden);
  h = Rng::mix(h ^ (static_cast<std::uint64_t>(purpose) + Rng::kGolden));
  for (auto c : counters) h = Rng::mix(h ^ (c + Rng::kGolden + (h << 6) + (h >> 2)));
  return Rng(h);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace fwsel
