#pragma once

// Seeded ground-truth manifolds and synthetic image batches.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "feature_matrix.hpp"
#include "network.hpp"
#include "rng.hpp"

namespace nasgeom {

enum class ManifoldKind { cube, sphere, gaussian };

constexpr std::string_view to_string(ManifoldKind k) noexcept {
  switch (k) {
    case ManifoldKind::cube: return "cube";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::gaussian: return "gaussian";
  }
  return "?";
}

struct ManifoldSample {
  Matrix data;  // N x D
  int true_dim = 0;
  ManifoldKind kind = ManifoldKind::cube;
  double noise_sigma = 0.0;
};

namespace detail {

inline void check_sample_args(int d, int n) {
  if (d < 1) throw std::invalid_argument("manifold dimension must be >= 1");
  if (n < 2) throw std::invalid_argument("manifold sample count must be >= 2");
}

}  // namespace detail

/// Uniform on [0, 1]^d.
inline ManifoldSample sample_cube(int d, int n, std::uint64_t seed) {
  detail::check_sample_args(d, n);
  CounterRng rng(hash_combine(seed, 0xC0BE));
  ManifoldSample m{Matrix(n, d), d, ManifoldKind::cube, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m.data(i, j) = rng.uniform();
  return m;
}

/// Standard Gaussian in R^d.
inline ManifoldSample sample_gaussian(int d, int n, std::uint64_t seed) {
  detail::check_sample_args(d, n);
  CounterRng rng(hash_combine(seed, 0x6A55));
  ManifoldSample m{Matrix(n, d), d, ManifoldKind::gaussian, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m.data(i, j) = rng.normal();
  return m;
}

/// Uniform on the unit sphere S^{d-1} in R^d (normalized Gaussians); true_dim = d as ambient of the sphere.
inline ManifoldSample sample_sphere(int d, int n, std::uint64_t seed) {
  detail::check_sample_args(d, n);
  CounterRng rng(hash_combine(seed, 0x5FE7));
  ManifoldSample m{Matrix(n, d), d, ManifoldKind::sphere, 0.0};
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < d; ++j) m.data(i, j) = rng.normal();
      norm = m.data.row(i).norm();
    } while (norm == 0.0);
    m.data.row(i) /= norm;
  }
  return m;
}

/// Haar-ish random orthogonal matrix: Q of the QR factorization of a Gaussian matrix.
inline Matrix random_orthogonal(int dim, std::uint64_t seed) {
  CounterRng rng(hash_combine(seed, 0x0A7));
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Sign convention so the distribution does not depend on Householder details.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

/// Zero-pads to D columns, rotates by a random orthogonal matrix, adds isotropic noise.
inline ManifoldSample embed(const ManifoldSample& m, int ambient, std::uint64_t seed, double noise_sigma = 0.0) {
  if (ambient < m.data.cols())
    throw std::invalid_argument("embed: ambient dimension " + std::to_string(ambient) + " below data width " +
                                std::to_string(m.data.cols()));
  if (noise_sigma < 0.0) throw std::invalid_argument("embed: noise_sigma must be >= 0");
  Matrix padded = Matrix::Zero(m.data.rows(), ambient);
  padded.leftCols(m.data.cols()) = m.data;
  ManifoldSample out = m;
  out.data = padded * random_orthogonal(ambient, seed).transpose();
  out.noise_sigma = noise_sigma;
  if (noise_sigma > 0.0) {
    CounterRng rng(hash_combine(seed, 0x401E));
    for (Eigen::Index i = 0; i < out.data.rows(); ++i)
      for (Eigen::Index j = 0; j < out.data.cols(); ++j) out.data(i, j) += noise_sigma * rng.normal();
  }
  return out;
}

struct ImageShape {
  int channels = 3;
  int height = 32;
  int width = 32;
};

/// Uniform-noise images in [0, 1) with round-robin labels 0..classes-1 (no labels when classes == 0).
inline ImageBatch synth_images(int count, ImageShape shape, std::uint64_t seed, int classes = 10) {
  if (count < 2) throw std::invalid_argument("synth_images: count must be >= 2");
  ImageBatch batch;
  batch.images = Tensor(count, shape.channels, shape.height, shape.width);
  CounterRng rng(hash_combine(seed, 0x1A6E));
  for (double& v : batch.images.data) v = rng.uniform();
  if (classes > 0)
    for (int i = 0; i < count; ++i) batch.labels.push_back(i % classes);
  return batch;
}

}  // namespace nasgeom
