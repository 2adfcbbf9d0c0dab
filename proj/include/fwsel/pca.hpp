#pragma once

#include <cstddef>
#include <vector>

#include "fwsel/common.hpp"

namespace fwsel {

struct PcaModel {
  std::vector<double> mean;
  Matrix components;                       // k x d, orthonormal rows
  std::vector<double> explained_variance;  // all d eigenvalues, descending
  std::size_t k = 0;

  double explained_ratio() const;  // share of variance kept by the first k components
};

struct EigenSystem {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i is the eigenvector of values[i]
  std::size_t sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal
// Frobenius norm drops below `tolerance` (scaled by the matrix norm when that
// exceeds 1). Each eigenvector is signed so its largest-magnitude entry is
// positive.
EigenSystem jacobi_eigen(Matrix a, double tolerance = 1e-10, std::size_t max_sweeps = 100);

// Sample covariance with the n-1 denominator.
Matrix covariance(const Matrix& x, const std::vector<double>& mean);

// Keeps the smallest k whose cumulative explained-variance ratio reaches the threshold.
PcaModel fit_pca(const Matrix& x, double variance_threshold = 0.95);

Matrix transform(const PcaModel& model, const Matrix& x);
// Maps reduced coordinates back into the original space.
Matrix reconstruct(const PcaModel& model, const Matrix& reduced);

}  // namespace fwsel
