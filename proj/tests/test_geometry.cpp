#include <gtest/gtest.h>

#include "nasgeom/geometry.hpp"
#include "nasgeom/synth.hpp"
#include "oracles.hpp"

using namespace nasgeom;

TEST(Center, Example) {
  Matrix x(2, 2);
  x << 0, 0, 2, 2;
  Matrix expected(2, 2);
  expected << -1, -1, 1, 1;
  EXPECT_EQ(center(x), expected);
}

TEST(Center, Idempotent) {
  const Matrix x = sample_gaussian(5, 40, 3).data.array() + 7.0;
  const Matrix c = center(x);
  EXPECT_LT(c.colwise().mean().cwiseAbs().maxCoeff(), 1e-12 * x.cwiseAbs().maxCoeff());
  EXPECT_LT((center(c) - c).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Knn, LineExample) {
  Matrix x(3, 1);
  x << 0, 3, 4;
  const auto t = knn(x, 1);
  EXPECT_EQ(t.index(0, 0), 1);
  EXPECT_EQ(t.distance(0, 0), 3.0);
  EXPECT_EQ(t.index(1, 0), 2);
  EXPECT_EQ(t.distance(1, 0), 1.0);
  EXPECT_EQ(t.index(2, 0), 1);
  EXPECT_EQ(t.distance(2, 0), 1.0);
  EXPECT_TRUE(t.duplicate_points.empty());
}

TEST(Knn, DuplicatesFlagged) {
  Matrix x(3, 2);
  x << 1, 1, 1, 1, 5, 5;
  const auto t = knn(x, 1);
  EXPECT_EQ(t.distance(0, 0), 0.0);
  EXPECT_EQ(t.duplicate_points, (std::vector<Eigen::Index>{0, 1}));
}

TEST(Knn, Errors) {
  Matrix x(3, 1);
  x << 0, 1, 2;
  EXPECT_THROW(knn(x, 3), std::invalid_argument);
  EXPECT_THROW(knn(x, 0), std::invalid_argument);
  EXPECT_THROW(knn(Matrix(1, 2), 1), std::invalid_argument);
}

TEST(Knn, MatchesQuadraticScan) {
  for (int t = 0; t < 10; ++t) {
    Matrix x = sample_gaussian(8, 50, 100 + t).data;
    if (t % 2) x = x.array().round();  // integer grid: many exact ties
    const auto table = knn(x, 7);
    const auto ref = oracle::knn_quadratic(x, 7);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 7; ++j) {
        ASSERT_EQ(table.index(i, j), ref.index[i][j]);
        ASSERT_EQ(table.distance(i, j), ref.distance[i][j]);
      }
  }
}

TEST(Distances, RotationInvariant) {
  const Matrix x = sample_gaussian(6, 30, 1).data;
  const Matrix q = random_orthogonal(6, 2);
  const auto a = pairwise_distances(x);
  const auto b = pairwise_distances(x * q);
  EXPECT_LT((a.d - b.d).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(a.d, a.d.transpose());
  EXPECT_TRUE(a.d.diagonal().isZero());
}

TEST(Pca, PlaneInTenD) {
  const Matrix plane = sample_gaussian(2, 200, 5).data;
  const Matrix x = embed(ManifoldSample{plane, 2, ManifoldKind::gaussian, 0.0}, 10, 6).data;
  const auto model = pca(center(x), 1.0);
  int nonzero = 0;
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) nonzero += model.eigenvalues[i] > 1e-10 * model.eigenvalues[0];
  EXPECT_EQ(nonzero, 2);
  EXPECT_EQ(model.retained, 2);
}

TEST(Pca, IsotropicSpread) {
  const auto model = pca(center(sample_gaussian(5, 1000, 8).data));
  EXPECT_LT(model.eigenvalues[0] / model.eigenvalues[4], 1.2 / 0.8);
  EXPECT_NEAR(model.eigenvalues[0], 1.0, 0.2);
  EXPECT_NEAR(model.eigenvalues[4], 1.0, 0.2);
}

TEST(Pca, EigenvalueSumIsTotalVariance) {
  const Matrix x = center(sample_cube(7, 300, 9).data * 3.0);
  const auto model = pca(x);
  const double total = x.squaredNorm() / static_cast<double>(x.rows() - 1);
  EXPECT_NEAR(model.total_variance(), total, 1e-9 * total);
}

TEST(Pca, ReconstructionError) {
  const Matrix x = center(sample_gaussian(6, 400, 10).data * Eigen::VectorXd::LinSpaced(6, 1, 6).asDiagonal());
  for (double thr : {0.5, 0.8, 0.95}) {
    const auto model = pca(x, thr);
    const Matrix back = pca_project(model, x) * model.retained_components().transpose();
    const double lost = (x - back).squaredNorm() / static_cast<double>(x.rows() - 1);
    EXPECT_LE(lost, (1.0 - thr) * model.total_variance() + 1e-9);
  }
}

TEST(Pca, RankZeroThrows) {
  Matrix x = Matrix::Constant(5, 3, 2.5);
  EXPECT_THROW(pca(x), std::invalid_argument);
  EXPECT_THROW(pca(x, 0.0), std::invalid_argument);
}

TEST(FishersPreprocess, UnitNormRows) {
  const auto cloud = fishers_preprocess(sample_cube(6, 200, 2).data);
  for (Eigen::Index i = 0; i < cloud.points.rows(); ++i) EXPECT_NEAR(cloud.points.row(i).norm(), 1.0, 1e-12);
}

TEST(FishersPreprocess, WhitenedGaussian) {
  const Matrix x = sample_gaussian(3, 5000, 4).data * Eigen::Vector3d(1, 4, 9).asDiagonal();
  const auto cloud = fishers_preprocess(x, 0.9999);
  EXPECT_EQ(cloud.dim, 3);
  const Matrix cov = cloud.points.transpose() * cloud.points / static_cast<double>(cloud.points.rows());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(cov(i, j), i == j ? 1.0 / 3.0 : 0.0, 0.05);
}

TEST(FishersPreprocess, DuplicatedColumnAddsNoDimension) {
  const Matrix base = sample_gaussian(3, 300, 12).data;
  Matrix x(300, 4);
  x << base, base.col(1);
  EXPECT_EQ(fishers_preprocess(x, 1.0).dim, fishers_preprocess(base, 1.0).dim);
}

TEST(FishersPreprocess, RowAtTheMeanIsDropped) {
  Matrix x = sample_gaussian(3, 50, 13).data;
  x.row(7).setZero();
  x.row(7) = x.colwise().sum() / 49.0;
  const auto cloud = fishers_preprocess(x, 1.0);
  EXPECT_EQ(cloud.dropped_rows, (std::vector<Eigen::Index>{7}));
  EXPECT_EQ(cloud.points.rows(), 49);
}

TEST(FishersPreprocess, RotationInvariantDimension) {
  const Matrix x = sample_gaussian(5, 300, 14).data * Eigen::VectorXd::LinSpaced(5, 1, 3).asDiagonal();
  const auto a = fishers_preprocess(x);
  const auto b = fishers_preprocess(x * random_orthogonal(5, 15));
  EXPECT_EQ(a.dim, b.dim);
  // Gram matrices agree: the sphere clouds are equal up to per-axis sign.
  EXPECT_LT((a.points * a.points.transpose() - b.points * b.points.transpose()).cwiseAbs().maxCoeff(), 1e-9);
}
