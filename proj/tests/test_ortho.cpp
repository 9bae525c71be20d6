#include <gtest/gtest.h>

#include <numbers>

#include "nasgeom/geometry.hpp"
#include "nasgeom/ortho.hpp"
#include "nasgeom/synth.hpp"

using namespace nasgeom;

namespace {

// Angles from atan2 of the cross and dot parts, as a reference for arccos.
AngleStats reference_pairwise(const Matrix& x) {
  std::vector<double> a;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double dot = x.row(i).dot(x.row(j));
      const double cross = std::sqrt(std::max(0.0, x.row(i).squaredNorm() * x.row(j).squaredNorm() - dot * dot));
      a.push_back(std::atan2(cross, dot) * 180.0 / std::numbers::pi);
    }
  double mean = 0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0;
  for (double v : a) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(a.size()))};
}

}  // namespace

TEST(PairwiseAngles, OrthonormalBasis) {
  const auto s = pairwise_angle_stats(Matrix::Identity(4, 4));
  EXPECT_DOUBLE_EQ(s.mean, 90.0);
  EXPECT_DOUBLE_EQ(s.std, 0.0);
}

TEST(PairwiseAngles, ParallelAndOpposite) {
  Matrix x(2, 3);
  x << 1, 2, 3, 2, 4, 6;
  EXPECT_NEAR(pairwise_angle_stats(x).mean, 0.0, 1e-6);
  x.row(1) = -x.row(0);
  EXPECT_DOUBLE_EQ(pairwise_angle_stats(x).mean, 180.0);
}

TEST(PairwiseAngles, MatchesAtan2Reference) {
  const Matrix x = center(sample_gaussian(10, 60, 3).data);
  const auto s = pairwise_angle_stats(x);
  const auto r = reference_pairwise(x);
  EXPECT_NEAR(s.mean, r.mean, 1e-9);
  EXPECT_NEAR(s.std, r.std, 1e-9);
}

TEST(PairwiseAngles, GaussianConcentration) {
  const auto s = pairwise_angle_stats(center(sample_gaussian(64, 128, 1).data));
  EXPECT_GE(s.mean, 88.0);
  EXPECT_LE(s.mean, 92.0);
  EXPECT_GE(s.std, 3.0);
  EXPECT_LE(s.std, 9.0);
}

TEST(PairwiseAngles, ZeroRowReported) {
  Matrix x = Matrix::Identity(4, 4);
  x.row(2).setZero();
  try {
    pairwise_angle_stats(x);
    FAIL();
  } catch (const DegenerateAngle& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(PairwiseAngles, RowScaleInvariant) {
  Matrix x = center(sample_gaussian(8, 30, 4).data);
  const auto a = pairwise_angle_stats(x);
  x.row(3) *= 17.5;
  x.row(9) *= 0.01;
  const auto b = pairwise_angle_stats(x);
  EXPECT_NEAR(a.mean, b.mean, 1e-12);
  EXPECT_NEAR(a.std, b.std, 1e-12);
}

TEST(OrthoMeasures, RotationInvariant) {
  const auto img = synth_images(40, {1, 4, 4}, 5);
  FeatureMatrix f{center(sample_gaussian(16, 40, 6).data), img.labels};
  const auto a = ortho_measures(f);
  f.values = f.values * random_orthogonal(16, 7);
  const auto b = ortho_measures(f);
  EXPECT_NEAR(a.f_mean, b.f_mean, 1e-9);
  EXPECT_NEAR(a.f_std, b.f_std, 1e-9);
  EXPECT_NEAR(a.cmean, b.cmean, 1e-9);
  EXPECT_NEAR(a.cstd, b.cstd, 1e-9);
}

TEST(CentroidAngles, OppositePairIsDegenerate) {
  Matrix x(2, 2);
  x << 1, 2, -1, -2;
  EXPECT_THROW(centroid_angle_stats(x, {0, 0}), DegenerateAngle);
}

TEST(CentroidAngles, SingletonClasses) {
  const Matrix x = center(sample_gaussian(5, 6, 2).data);
  const auto s = centroid_angle_stats(x, {0, 1, 2, 3, 4, 5});
  EXPECT_NEAR(s.mean, 0.0, 1e-6);
  EXPECT_NEAR(s.std, 0.0, 1e-6);
}

TEST(CentroidAngles, BalancedGaussianClasses) {
  std::vector<int> labels(128);
  for (int i = 0; i < 128; ++i) labels[i] = i % 10;
  const auto s = centroid_angle_stats(center(sample_gaussian(64, 128, 9).data), labels);
  EXPECT_GE(s.mean, 60.0);
  EXPECT_LE(s.mean, 90.0);
}

TEST(CentroidAngles, LabelCountMismatch) {
  EXPECT_THROW(centroid_angle_stats(Matrix::Identity(3, 3), {0, 1}), std::invalid_argument);
}
