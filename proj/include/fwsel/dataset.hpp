#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fwsel/common.hpp"

namespace fwsel {

/// Labeled numeric dataset. Label 1 marks the positive (anxiety) class.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  // Ground truth from the synthetic generator; empty when unknown.
  std::vector<bool> informative;

  std::size_t rows() const { return features.rows(); }
  std::size_t dims() const { return features.cols(); }
  std::size_t positives() const;

  Dataset subset_rows(std::span<const std::size_t> rows) const;
  Dataset subset_cols(std::span<const std::size_t> cols) const;

  // Throws DataError if the invariants (shape, 0/1 labels, finite values) fail.
  void validate() const;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  // Source row ids, in the order they appear in train/test.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

struct SynthSpec {
  std::size_t n_samples = 200;
  std::size_t d_informative = 5;
  std::size_t d_noise = 20;
  double class_imbalance = 0.17;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
};

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 0 marks a zero-variance column

  void apply(Matrix& x) const;
};

Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text, const std::string& origin = "<memory>");
// Values are written with 17 significant digits, so reloading is bit-exact.
void save_csv(const Dataset& ds, const std::filesystem::path& path);
std::string format_csv(const Dataset& ds);

// Per-class stratified partition. Each class contributes
// clamp(round(n_c * test_fraction), 1, n_c - 1) rows to the test side.
SplitPair stratified_split(const Dataset& ds, double test_fraction, std::uint64_t seed);

Dataset generate_synthetic(const SynthSpec& spec);

// Z-scores both sides with statistics from train only (population std).
Standardizer standardize(SplitPair& split);

}  // namespace fwsel
