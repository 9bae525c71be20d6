#include <gtest/gtest.h>

#include "nasgeom/network.hpp"
#include "nasgeom/synth.hpp"

using namespace nasgeom;

namespace {

const char* kMixed = "|nor_conv_3x3~0|+|none~0|skip_connect~1|+|avg_pool_3x3~0|nor_conv_1x1~1|nor_conv_3x3~2|";

Network small_net(const std::string& arch, int channels = 4, int size = 8, std::uint64_t seed = 1) {
  NetworkConfig cfg;
  cfg.initial_channels = channels;
  cfg.height = cfg.width = size;
  return kaiming_init(build_network(parse_arch_string(arch), cfg), InitSpec{std::numbers::sqrt2, seed, true});
}

Tensor random_tensor(int n, int c, int h, int w, std::uint64_t seed) {
  Tensor t(n, c, h, w);
  CounterRng r(seed);
  for (double& v : t.data) v = r.normal();
  return t;
}

}  // namespace

TEST(Network, FeatureWidthIsFourC) {
  NetworkConfig cfg;
  cfg.initial_channels = 16;
  EXPECT_EQ(build_network(parse_arch_string(kMixed), cfg).feature_width(), 64);
}

TEST(Network, SmallForwardShape) {
  NetworkConfig cfg;
  cfg.initial_channels = 4;
  const auto net = kaiming_init(build_network(parse_arch_string(kMixed), cfg), InitSpec{});
  const auto batch = synth_images(8, {3, 32, 32}, 3);
  const auto f = forward_features(net, batch);
  EXPECT_EQ(f.rows(), 8);
  EXPECT_EQ(f.cols(), 16);
  EXPECT_TRUE(f.values.allFinite());
  EXPECT_EQ(f.labels, batch.labels);
}

// The last stage's cell zeroes its input, so only the finite all-zero output is left.
TEST(Network, AllNoneCellIsFinite) {
  const auto net = small_net("|none~0|+|none~0|none~1|+|none~0|none~1|none~2|");
  const auto f = forward_features(net, synth_images(6, {3, 8, 8}, 2));
  EXPECT_TRUE(f.values.allFinite());
  EXPECT_EQ(f.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Network, ConstantZeroBatchIsFinite) {
  const auto net = small_net(kMixed);
  ImageBatch batch{Tensor(4, 3, 8, 8, 0.0), {}};
  EXPECT_TRUE(forward_features(net, batch).values.allFinite());
}

TEST(Network, DuplicatingSamplesLeavesRowsUnchanged) {
  const auto net = small_net(kMixed);
  const auto batch = synth_images(5, {3, 8, 8}, 11);
  ImageBatch doubled{Tensor(10, 3, 8, 8), {}};
  const auto per = batch.images.sample_size();
  for (int i = 0; i < 5; ++i)
    for (int copy = 0; copy < 2; ++copy)
      std::copy_n(batch.images.sample(i), per, doubled.images.sample(2 * i + copy));
  const auto a = forward_features(net, batch);
  const auto b = forward_features(net, doubled);
  for (int i = 0; i < 5; ++i) {
    EXPECT_LT((a.values.row(i) - b.values.row(2 * i)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((a.values.row(i) - b.values.row(2 * i + 1)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Network, PermutationEquivariance) {
  const auto net = small_net(kMixed);
  const auto batch = synth_images(6, {3, 8, 8}, 4);
  const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  ImageBatch shuffled{Tensor(6, 3, 8, 8), {}};
  for (int i = 0; i < 6; ++i)
    std::copy_n(batch.images.sample(perm[i]), batch.images.sample_size(), shuffled.images.sample(i));
  const auto a = forward_features(net, batch);
  const auto b = forward_features(net, shuffled);
  for (int i = 0; i < 6; ++i) EXPECT_LT((b.values.row(i) - a.values.row(perm[i])).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Network, DeterministicPerSeed) {
  const auto batch = synth_images(4, {3, 8, 8}, 9);
  const auto a = forward_features(small_net(kMixed, 4, 8, 7), batch);
  const auto b = forward_features(small_net(kMixed, 4, 8, 7), batch);
  EXPECT_EQ(a.values, b.values);
  const auto c = forward_features(small_net(kMixed, 4, 8, 8), batch);
  EXPECT_NE(a.values, c.values);
}

TEST(Network, Errors) {
  const auto net = small_net(kMixed);
  EXPECT_THROW(forward_features(net, synth_images(1, {3, 8, 8}, 0)), std::invalid_argument);
  EXPECT_THROW(forward_features(net, synth_images(4, {3, 16, 16}, 0)), std::invalid_argument);
  NetworkConfig bad;
  bad.initial_channels = 0;
  EXPECT_THROW(build_network(parse_arch_string(kMixed), bad), std::invalid_argument);
  bad = NetworkConfig{};
  bad.cells_per_stage = 0;
  EXPECT_THROW(build_network(parse_arch_string(kMixed), bad), std::invalid_argument);
}

TEST(Network, NonFiniteInputReportsLayer) {
  const auto net = small_net(kMixed);
  auto batch = synth_images(4, {3, 8, 8}, 0);
  batch.images.data[5] = std::numeric_limits<double>::infinity();
  try {
    forward_features(net, batch);
    FAIL() << "expected NonFiniteActivation";
  } catch (const NonFiniteActivation& e) {
    EXPECT_EQ(e.layer(), 0);
  }
}

TEST(Kaiming, BoundFormula) {
  EXPECT_DOUBLE_EQ(kaiming_bound(1.0, 3), 1.0);
  EXPECT_NEAR(kaiming_bound(std::numbers::sqrt2, 27), 0.47140, 5e-6);
}

TEST(Kaiming, WeightsWithinBoundAndBnReset) {
  auto net = small_net(kMixed, 8, 8, 3);
  for (const auto& u : net.units) {
    const double b = kaiming_bound(std::numbers::sqrt2, u.conv.fan_in());
    EXPECT_LT(u.conv.weight.cwiseAbs().maxCoeff(), b);
    EXPECT_LT(u.conv.bias.cwiseAbs().maxCoeff(), b);
    const double count = static_cast<double>(u.conv.weight.size());
    EXPECT_LT(std::abs(u.conv.weight.mean()), 4.0 * 2.0 * b / std::sqrt(12.0 * count));
    if (u.has_bn) {
      EXPECT_TRUE(u.bn_scale.isOnes());
      EXPECT_TRUE(u.bn_shift.isZero());
    }
  }
  EXPECT_EQ(net.units.front().conv.fan_in(), 27);
}

TEST(Kaiming, ZeroBiasOption) {
  auto net = kaiming_init(build_network(parse_arch_string(kMixed), NetworkConfig{}), InitSpec{1.0, 2, false});
  for (const auto& u : net.units) EXPECT_TRUE(u.conv.bias.isZero());
}

TEST(Kaiming, SameSeedBitIdentical) {
  const auto a = small_net(kMixed, 4, 8, 7);
  const auto b = small_net(kMixed, 4, 8, 7);
  ASSERT_EQ(a.units.size(), b.units.size());
  for (std::size_t i = 0; i < a.units.size(); ++i) EXPECT_EQ(a.units[i].conv.weight, b.units[i].conv.weight);
}

// Direct-loop convolution as an oracle for the im2col path.
TEST(Conv2d, MatchesDirectLoop) {
  for (int stride : {1, 2}) {
    auto unit = detail::make_unit(3, 5, 3, stride, false, false);
    CounterRng r(stride);
    for (Eigen::Index i = 0; i < unit.conv.weight.size(); ++i) unit.conv.weight.data()[i] = r.normal();
    for (Eigen::Index i = 0; i < unit.conv.bias.size(); ++i) unit.conv.bias[i] = r.normal();
    const Tensor x = random_tensor(2, 3, 6, 6, 17);
    const Tensor y = detail::conv2d(x, unit.conv);
    const int oh = (6 + 2 - 3) / stride + 1;
    ASSERT_EQ(y.h, oh);
    for (int n = 0; n < 2; ++n)
      for (int o = 0; o < 5; ++o)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < oh; ++ox) {
            double s = unit.conv.bias[o];
            for (int c = 0; c < 3; ++c)
              for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) {
                  const int iy = oy * stride + ky - 1, ix = ox * stride + kx - 1;
                  if (iy < 0 || ix < 0 || iy >= 6 || ix >= 6) continue;
                  s += unit.conv.weight(o, (c * 3 + ky) * 3 + kx) * x.at(n, c, iy, ix);
                }
            EXPECT_NEAR(y.at(n, o, oy, ox), s, 1e-12);
          }
  }
}

TEST(Pooling, AvgPool3x3ExcludesPadding) {
  Tensor x(1, 1, 2, 2);
  x.data = {1, 2, 3, 4};
  const Tensor y = detail::avg_pool_3x3(x);
  for (double v : y.data) EXPECT_DOUBLE_EQ(v, 2.5);
}

TEST(BatchNorm, NormalizesPerChannel) {
  Tensor x = random_tensor(4, 2, 3, 3, 5);
  detail::batch_norm(x, Vector::Ones(2), Vector::Zero(2), 1e-5);
  for (int c = 0; c < 2; ++c) {
    double sum = 0, sq = 0;
    for (int n = 0; n < 4; ++n)
      for (int i = 0; i < 9; ++i) {
        const double v = x.sample(n)[c * 9 + i];
        sum += v;
        sq += v * v;
      }
    EXPECT_NEAR(sum / 36, 0.0, 1e-12);
    EXPECT_NEAR(sq / 36, 1.0, 1e-3);
  }
}
