#include "fwsel/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fwsel {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

double PcaModel::explained_ratio() const {
  const double total = std::accumulate(explained_variance.begin(), explained_variance.end(), 0.0);
  if (total <= 0.0) return 1.0;
  return std::accumulate(explained_variance.begin(), explained_variance.begin() + static_cast<long>(k), 0.0) / total;
}

EigenSystem jacobi_eigen(Matrix a, double tolerance, std::size_t max_sweeps) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  // The tolerance is relative to the matrix norm once that exceeds 1, so badly
  // scaled covariances still converge.
  double frob = 0;
  for (double x : a.data()) frob += x * x;
  const double limit = tolerance * std::max(1.0, std::sqrt(frob));

  EigenSystem es;
  while (off_diagonal_norm(a) >= limit) {
    if (es.sweeps == max_sweeps) throw InvariantError("jacobi_eigen: no convergence");
    ++es.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  es.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t col = order[r];
    es.values.push_back(a(col, col));
    std::size_t big = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, col)) > std::abs(v(big, col))) big = k;
    const double sign = v(big, col) < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) es.vectors(r, k) = sign * v(k, col);
  }
  return es;
}

Matrix covariance(const Matrix& x, const std::vector<double>& mean) {
  const std::size_t n = x.rows(), d = x.cols();
  Matrix cov(d, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < d; ++i) {
      const double di = x(r, i) - mean[i];
      for (std::size_t j = i; j < d; ++j) cov(i, j) += di * (x(r, j) - mean[j]);
    }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) /= static_cast<double>(n - 1);
      cov(j, i) = cov(i, j);
    }
  return cov;
}

PcaModel fit_pca(const Matrix& x, double variance_threshold) {
  if (x.rows() < 2) throw std::invalid_argument("fit_pca: need at least 2 rows");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    throw std::invalid_argument("pca.variance_threshold: must be in (0, 1]");
  const std::size_t d = x.cols();
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) model.mean[c] += x(r, c);
  for (auto& m : model.mean) m /= static_cast<double>(x.rows());

  auto es = jacobi_eigen(covariance(x, model.mean));
  // Round-off can leave tiny negative eigenvalues on rank-deficient data.
  for (auto& v : es.values) v = std::max(v, 0.0);
  model.explained_variance = es.values;

  const double total = std::accumulate(es.values.begin(), es.values.end(), 0.0);
  model.k = d;
  if (total > 0.0) {
    double acc = 0;
    for (std::size_t i = 0; i < d; ++i) {
      acc += es.values[i];
      if (acc / total >= variance_threshold - 1e-12) {
        model.k = i + 1;
        break;
      }
    }
  } else {
    model.k = std::min<std::size_t>(1, d);
  }
  std::vector<std::size_t> keep(model.k);
  std::iota(keep.begin(), keep.end(), 0);
  model.components = es.vectors.select_rows(keep);
  return model;
}

Matrix transform(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.mean.size()) throw std::invalid_argument("pca transform: column count mismatch");
  Matrix out(x.rows(), model.k);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < model.k; ++c) {
      double s = 0;
      for (std::size_t j = 0; j < x.cols(); ++j) s += (x(r, j) - model.mean[j]) * model.components(c, j);
      out(r, c) = s;
    }
  return out;
}

Matrix reconstruct(const PcaModel& model, const Matrix& reduced) {
  if (reduced.cols() != model.k) throw std::invalid_argument("pca reconstruct: column count mismatch");
  const std::size_t d = model.mean.size();
  Matrix out(reduced.rows(), d);
  for (std::size_t r = 0; r < reduced.rows(); ++r)
    for (std::size_t j = 0; j < d; ++j) {
      double s = model.mean[j];
      for (std::size_t c = 0; c < model.k; ++c) s += reduced(r, c) * model.components(c, j);
      out(r, j) = s;
    }
  return out;
}

}  // namespace fwsel
