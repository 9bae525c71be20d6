#pragma once

// Shared geometric kernels: centering, exact pairwise distances, k-nearest
// neighbor tables, PCA, and the centre/reduce/whiten/project chain used by the
// Fisher separability estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "feature_matrix.hpp"

namespace nasgeom {

inline Matrix center(const Matrix& x) {
  if (x.rows() < 1) throw std::invalid_argument("center: empty matrix");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return x.rowwise() - mean;
}

inline FeatureMatrix center(const FeatureMatrix& x) { return FeatureMatrix{center(x.values), x.labels}; }

/// Euclidean distance accumulated coordinate by coordinate in index order.
inline double euclidean(const Matrix& x, Eigen::Index i, Eigen::Index j) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = x(i, c) - x(j, c);
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Symmetric N x N Euclidean distances, zero diagonal.
struct DistanceMatrix {
  Matrix d;
  Eigen::Index size() const noexcept { return d.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return d(i, j); }
};

inline DistanceMatrix pairwise_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw std::invalid_argument("pairwise_distances: need at least 2 points");
  DistanceMatrix out{Matrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out.d(i, j) = out.d(j, i) = euclidean(x, i, j);
  return out;
}

/// Per point: the k nearest other points, ascending by distance, ties to the lower index.
struct NeighborTable {
  int k = 0;
  Eigen::MatrixXi index;     // N x k
  Matrix distance;           // N x k
  std::vector<Eigen::Index> duplicate_points;  // points with a zero-distance neighbor

  Eigen::Index size() const noexcept { return index.rows(); }
  /// j-th nearest distance, 1-based as in the estimator formulas.
  double nth(Eigen::Index point, int j) const { return distance(point, j - 1); }
};

inline NeighborTable knn(const DistanceMatrix& dist, int k) {
  const Eigen::Index n = dist.size();
  if (n < 2) throw std::invalid_argument("knn: need at least 2 points");
  if (k < 1 || k >= n)
    throw std::invalid_argument("knn: k=" + std::to_string(k) + " must satisfy 1 <= k < N=" + std::to_string(n));
  NeighborTable t;
  t.k = k;
  t.index.resize(n, k);
  t.distance.resize(n, k);
  std::vector<std::pair<double, Eigen::Index>> row(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) row[m++] = {dist(i, j), j};
    std::partial_sort(row.begin(), row.begin() + k, row.end());
    for (int j = 0; j < k; ++j) {
      t.distance(i, j) = row[static_cast<std::size_t>(j)].first;
      t.index(i, j) = static_cast<int>(row[static_cast<std::size_t>(j)].second);
    }
    if (t.distance(i, 0) == 0.0) t.duplicate_points.push_back(i);
  }
  return t;
}

inline NeighborTable knn(const Matrix& x, int k) { return knn(pairwise_distances(x), k); }

struct PcaModel {
  Matrix components;    // D x D, columns orthonormal, ordered by descending eigenvalue
  Vector eigenvalues;   // descending, >= 0
  Eigen::RowVectorXd mean;
  int retained = 0;

  double total_variance() const { return eigenvalues.sum(); }
  Matrix retained_components() const { return components.leftCols(retained); }
};

/// Eigendecomposition of the sample covariance. Retains the smallest m whose
/// cumulative explained variance reaches variance_threshold.
inline PcaModel pca(const Matrix& x, double variance_threshold = 0.99) {
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    throw std::invalid_argument("pca: variance_threshold must lie in (0, 1]");
  if (x.rows() < 2) throw std::invalid_argument("pca: need more than one row");
  PcaModel model;
  model.mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - model.mean;
  const Matrix cov = (centred.transpose() * centred) / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");
  const Eigen::Index d = cov.rows();
  model.components.resize(d, d);
  model.eigenvalues.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    model.eigenvalues[i] = std::max(0.0, solver.eigenvalues()[d - 1 - i]);
    model.components.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  const double total = model.eigenvalues.sum();
  const double magnitude = x.cwiseAbs().maxCoeff();
  if (!(total > 0.0) || model.eigenvalues[0] <= 1e-26 * magnitude * magnitude)
    throw std::invalid_argument("pca: rank-0 input (all rows identical)");
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    cumulative += model.eigenvalues[i];
    if (cumulative >= variance_threshold * total * (1.0 - 1e-12)) {
      model.retained = static_cast<int>(i) + 1;
      break;
    }
  }
  if (model.retained == 0) model.retained = static_cast<int>(d);
  // Eigenvalues at round-off level carry no variance; never retain them.
  const double floor = model.eigenvalues[0] * 1e-12;
  while (model.retained > 1 && model.eigenvalues[model.retained - 1] <= floor) --model.retained;
  return model;
}

/// Coordinates of x in the retained principal axes.
inline Matrix pca_project(const PcaModel& model, const Matrix& x) {
  return (x.rowwise() - model.mean) * model.retained_components();
}

/// Rows of unit norm in the whitened principal subspace.
struct SphereCloud {
  Matrix points;  // rows x dim
  int dim = 0;
  std::vector<Eigen::Index> dropped_rows;  // zero norm after whitening
  std::vector<Eigen::Index> kept_rows;     // source row of each output row
  bool low_rank = false;                   // dim < 2
};

inline SphereCloud fishers_preprocess(const Matrix& x, double variance_threshold = 0.99) {
  if (x.rows() < 3) throw std::invalid_argument("fishers_preprocess: need at least 3 rows");
  const PcaModel model = pca(x, variance_threshold);
  Matrix z = pca_project(model, x);
  for (int c = 0; c < model.retained; ++c) z.col(c) /= std::sqrt(model.eigenvalues[c]);
  SphereCloud cloud;
  cloud.dim = model.retained;
  cloud.low_rank = model.retained < 2;
  const Vector norms = z.rowwise().norm();
  const double scale = norms.maxCoeff();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (norms[i] <= 1e-12 * scale)
      cloud.dropped_rows.push_back(i);
    else
      cloud.kept_rows.push_back(i);
  }
  cloud.points.resize(static_cast<Eigen::Index>(cloud.kept_rows.size()), model.retained);
  for (std::size_t r = 0; r < cloud.kept_rows.size(); ++r) {
    const Eigen::Index i = cloud.kept_rows[r];
    cloud.points.row(static_cast<Eigen::Index>(r)) = z.row(i) / norms[i];
  }
  return cloud;
}

}  // namespace nasgeom
