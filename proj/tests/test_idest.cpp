#include <gtest/gtest.h>

#include <numbers>

#include "nasgeom/idest.hpp"
#include "nasgeom/lambert_w.hpp"
#include "nasgeom/synth.hpp"
#include "oracles.hpp"

using namespace nasgeom;

namespace {

Matrix lattice_line(int n) {
  Matrix x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = i;
  return x;
}

Matrix embedded_cube(int d, int n, int ambient, std::uint64_t seed) {
  return embed(sample_cube(d, n, seed), ambient, seed + 1).data;
}

// Direct pair loop for the inseparability profile.
std::vector<double> reference_profile(const Matrix& s, const std::vector<double>& alphas) {
  std::vector<double> out;
  const auto n = s.rows();
  for (double a : alphas) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int count = 0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i && s.row(i).dot(s.row(j)) > a * s.row(i).dot(s.row(i))) ++count;
      total += static_cast<double>(count) / static_cast<double>(n - 1);
    }
    out.push_back(total / static_cast<double>(n));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(LambertW, SpecialValues) {
  EXPECT_EQ(lambert_w0(0.0), 0.0);
  EXPECT_NEAR(lambert_w0(std::numbers::e), 1.0, 1e-15);
  EXPECT_NEAR(lambert_w0(-1.0 / std::numbers::e), -1.0, 1e-7);
}

TEST(LambertW, MatchesBisection) {
  EXPECT_NEAR(lambert_w0(1.0), 0.567143290, 1e-9);
  for (double x : {-0.3, -0.1, 0.5, 1.0, 2.0, 10.0, 1e3, 1e6})
    EXPECT_NEAR(lambert_w0(x), oracle::lambert_w_bisect(x), 1e-12 * std::max(1.0, std::abs(oracle::lambert_w_bisect(x))));
}

TEST(LambertW, DomainError) { EXPECT_THROW(lambert_w0(-0.4), std::domain_error); }

// ---------------------------------------------------------------------------

TEST(FisherS, RoundTripAtTen) {
  const double p = fisher_inseparability_closed_form(0.8, 10.0);
  EXPECT_NEAR(fisher_dimension(0.8, p), 10.0, 1e-9);
}

TEST(FisherS, ProfileMatchesPairLoop) {
  const auto cloud = fishers_preprocess(sample_gaussian(4, 150, 3).data);
  const auto grid = default_alpha_grid();
  const auto got = fisher_inseparability_profile(cloud.points, grid);
  const auto ref = reference_profile(cloud.points, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_DOUBLE_EQ(got[i], ref[i]);
}

TEST(FisherS, ProfileNonIncreasingAndChosenAlphaOnGrid) {
  FisherSProfile profile;
  const auto est = estimate_fishers(sample_sphere(5, 1000, 2).data, EstimatorParams{}, &profile);
  ASSERT_TRUE(est.has_value());
  EXPECT_EQ(profile.alpha_grid.size(), 20u);
  for (std::size_t i = 1; i < profile.inseparability.size(); ++i)
    EXPECT_LE(profile.inseparability[i], profile.inseparability[i - 1]);
  EXPECT_NE(std::find(profile.alpha_grid.begin(), profile.alpha_grid.end(), profile.chosen_alpha), profile.alpha_grid.end());
  EXPECT_GE(est.value, 3.5);
  EXPECT_LE(est.value, 6.5);
}

TEST(FisherS, EquilateralTriangleIsFullySeparable) {
  Matrix x(3, 2);
  for (int i = 0; i < 3; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 3.0;
    x.row(i) << std::cos(t), std::sin(t);
  }
  FisherSProfile profile;
  const auto est = estimate_fishers(x, EstimatorParams{}, &profile);
  EXPECT_EQ(est.status, IdStatus::fully_separable);
  EXPECT_FALSE(est.has_value());
  EXPECT_EQ(profile.retained_n, 2);
  for (double p : profile.inseparability) EXPECT_EQ(p, 0.0);
}

TEST(FisherS, TooFewRows) { EXPECT_THROW(estimate_fishers(Matrix::Identity(2, 2), EstimatorParams{}), EstimatorError); }

// ---------------------------------------------------------------------------

TEST(Lpca, LineIsOne) {
  Matrix x = lattice_line(50) * Eigen::RowVectorXd::LinSpaced(64, 1, 2);
  EXPECT_EQ(estimate(IdMethod::lpca, x).value, 1.0);
}

TEST(Lpca, NoisyPlane) {
  const auto m = embed(sample_cube(2, 300, 1), 10, 2, 1e-6);
  EXPECT_EQ(estimate(IdMethod::lpca, m.data).value, 2.0);
}

TEST(Lpca, IsotropicGaussian) { EXPECT_EQ(estimate(IdMethod::lpca, sample_gaussian(5, 2000, 3).data).value, 5.0); }

TEST(Lpca, ZeroVariance) { EXPECT_THROW(estimate(IdMethod::lpca, Matrix::Ones(10, 3)), EstimatorError); }

TEST(CorrInt, SegmentAndSquare) {
  EXPECT_NEAR(estimate(IdMethod::corrint, sample_cube(1, 1000, 4).data).value, 1.0, 0.2);
  EXPECT_NEAR(estimate(IdMethod::corrint, sample_cube(2, 1000, 5).data).value, 2.0, 0.4);
}

TEST(CorrInt, IdenticalPoints) { EXPECT_THROW(estimate(IdMethod::corrint, Matrix::Ones(40, 3)), EstimatorError); }

TEST(Mle, SegmentAndCube) {
  EXPECT_NEAR(estimate(IdMethod::mle, sample_cube(1, 1000, 6).data).value, 1.0, 0.15);
  EXPECT_NEAR(estimate(IdMethod::mle, sample_cube(8, 2000, 7).data).value, 8.0, 2.0);
}

TEST(Mle, DuplicatesExcluded) {
  Matrix x = sample_cube(3, 100, 8).data;
  x.row(1) = x.row(0);
  const auto est = estimate(IdMethod::mle, x);
  EXPECT_EQ(est.excluded, (std::vector<Eigen::Index>{0, 1}));
  EXPECT_TRUE(est.has_value());
}

TEST(Mle, TooManyDuplicates) {
  Matrix x = sample_cube(3, 100, 8).data;
  for (int i = 0; i < 30; ++i) x.row(2 * i + 1) = x.row(2 * i);
  EXPECT_THROW(estimate(IdMethod::mle, x), EstimatorError);
}

TEST(Mada, DiskAndCube) {
  const Matrix square = sample_cube(2, 4000, 9).data.array() * 2.0 - 1.0;
  Matrix disk(2000, 2);
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < square.rows() && n < 2000; ++i)
    if (square.row(i).norm() <= 1.0) disk.row(n++) = square.row(i);
  ASSERT_EQ(n, 2000);
  EXPECT_NEAR(estimate(IdMethod::mada, disk).value, 2.0, 0.4);
  EXPECT_NEAR(estimate(IdMethod::mada, sample_cube(4, 2000, 10).data).value, 4.0, 1.2);
}

TEST(Mada, LatticeInteriorIsOne) {
  EstimatorParams p;
  p.mada_k = 20;
  const auto est = estimate(IdMethod::mada, lattice_line(1000), p);
  EXPECT_NEAR(est.value, 1.0, 0.02);
}

TEST(Mada, OddKRejected) {
  EstimatorParams p;
  p.mada_k = 7;
  EXPECT_THROW(estimate_mada(IdContext(lattice_line(50), p), p), EstimatorError);
}

TEST(Mom, OneSidedRankClosedForm) {
  // Point 0 of a lattice sees neighbors at distances 1..k: local ID = (k+1)/(k-1).
  const int k = 20;
  Matrix x(k + 1, 1);
  for (int i = 0; i <= k; ++i) x(i, 0) = i * i * 1e-9 + i;  // break symmetric ties elsewhere
  EstimatorParams p;
  p.mom_k = k;
  p.max_excluded_fraction = 1.0;
  IdContext ctx(x, p);
  double m1 = 0;
  for (int j = 1; j <= k; ++j) m1 += ctx.table().nth(0, j);
  m1 /= k;
  EXPECT_NEAR(m1 / (ctx.table().nth(0, k) - m1), (k + 1.0) / (k - 1.0), 1e-6);
}

TEST(Mom, Cube) { EXPECT_NEAR(estimate(IdMethod::mom, sample_cube(5, 2000, 11).data).value, 5.0, 1.5); }

TEST(Mom, SimplexPointsExcluded) {
  // 21 basis vectors: each sees 20 neighbors at exactly sqrt(2).
  Matrix x = sample_gaussian(30, 221, 12).data;
  x.col(29).array() += 100.0;
  x.topRows(21).setZero();
  x.topLeftCorner(21, 21).setIdentity();
  const auto est = estimate(IdMethod::mom, x);
  EXPECT_EQ(est.excluded.size(), 21u);
  EXPECT_TRUE(est.has_value());
}

TEST(TwoNN, SquareAndSegment) {
  EXPECT_NEAR(estimate(IdMethod::twonn, sample_cube(2, 2000, 13).data).value, 2.0, 0.3);
  EXPECT_NEAR(estimate(IdMethod::twonn, sample_cube(1, 2000, 14).data).value, 1.0, 0.2);
}

TEST(TwoNN, TooFewPoints) { EXPECT_THROW(estimate(IdMethod::twonn, sample_cube(2, 10, 1).data), EstimatorError); }

TEST(Mind, LogLikelihoodExample) {
  const std::vector<double> rho(7, 0.5);
  EXPECT_NEAR(mind_log_likelihood(rho, 2, 1.0), -7.0 * std::numbers::ln2, 1e-12);
}

TEST(Mind, ThreeCube) {
  const Matrix x = sample_cube(3, 2000, 15).data;
  EstimatorParams p;
  const auto m = estimate_mind_ml(IdContext(x, p), p);
  EXPECT_EQ(m.mli.value, 3.0);
  EXPECT_GE(m.mlk.value, 2.4);
  EXPECT_LE(m.mlk.value, 3.6);
}

TEST(Carter, SegmentAndFourD) {
  const auto a = estimate(IdMethod::knn, sample_cube(1, 2000, 16).data);
  EXPECT_GE(a.value, 0.7);
  EXPECT_LE(a.value, 1.5);
  const auto b = estimate(IdMethod::knn, sample_cube(4, 2000, 17).data);
  EXPECT_GE(b.value, 2.5);
  EXPECT_LE(b.value, 6.0);
}

TEST(Carter, EqualSubsetSizes) {
  EstimatorParams p;
  p.knn_subset_sizes = {100, 100, 200};
  EXPECT_THROW(estimate(IdMethod::knn, sample_cube(2, 200, 1).data, p), EstimatorError);
}

// ---------------------------------------------------------------------------

TEST(Invariance, RotationTranslationAndScale) {
  const Matrix x = embedded_cube(3, 400, 8, 20);
  const Matrix t = Eigen::RowVectorXd::LinSpaced(8, -5, 5);
  const Matrix moved = (x * random_orthogonal(8, 21)).rowwise() + t.row(0);
  for (IdMethod m : kAllIdMethods) {
    const double a = estimate(m, x).value;
    EXPECT_NEAR(estimate(m, moved).value, a, 1e-6) << to_string(m);
    EXPECT_NEAR(estimate(m, Matrix(3.0 * x)).value, a, 1e-6) << to_string(m);
  }
}

TEST(Params, Validation) {
  EstimatorParams p;
  p.mle_k = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.twonn_discard = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.alpha_grid = {0.9, 0.8};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_NO_THROW(EstimatorParams{}.validate());
}

TEST(Methods, NamesRoundTrip) {
  for (IdMethod m : kAllIdMethods) EXPECT_EQ(id_method_from_string(to_string(m)), m);
  EXPECT_FALSE(id_method_from_string("pca").has_value());
}
