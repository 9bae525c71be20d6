#pragma once

// Untrained NAS-Bench-201-style convolutional networks: assembly,
// Kaiming-uniform initialization, and batch-statistics forward passes that
// return global-average-pooled features.
//
// Macro skeleton:
//   stem   3x3 conv (in -> C) + BN
//   stage  N cells at C, reduction, N cells at 2C, reduction, N cells at 4C
//   head   BN + ReLU + global average pool  -> 4C features
//
// Cell ops: nor_conv_kxk = ReLU -> conv(k, stride 1) -> BN; avg_pool_3x3 =
// 3x3/stride 1 average excluding padding; skip_connect = identity; none = 0.
// Reduction: ReLU-conv3x3(stride 2)-BN -> ReLU-conv3x3-BN, plus a shortcut of
// 2x2/stride 2 average pooling followed by a 1x1 conv.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "arch.hpp"
#include "feature_matrix.hpp"
#include "rng.hpp"

namespace nasgeom {

struct NetworkConfig {
  int cells_per_stage = 1;
  int initial_channels = 16;
  int in_channels = 3;
  int height = 32;
  int width = 32;
  double bn_epsilon = 1e-5;

  std::array<int, 3> stage_channels() const noexcept {
    return {initial_channels, 2 * initial_channels, 4 * initial_channels};
  }
  int feature_width() const noexcept { return 4 * initial_channels; }

  void validate() const {
    if (cells_per_stage < 1) throw std::invalid_argument("cells_per_stage must be >= 1");
    if (initial_channels < 1) throw std::invalid_argument("initial_channels must be >= 1");
    if (in_channels < 1) throw std::invalid_argument("input channels must be >= 1");
    if (height < 4 || width < 4 || height % 4 != 0 || width % 4 != 0)
      throw std::invalid_argument("input height/width must be positive multiples of 4");
    if (!(bn_epsilon > 0.0)) throw std::invalid_argument("bn_epsilon must be positive");
  }
};

struct InitSpec {
  double gain = std::numbers::sqrt2;
  std::uint64_t seed = 0;
  bool sample_bias = true;  // false: biases zero
};

/// Kaiming-uniform bound g * sqrt(3 / fan_in).
inline double kaiming_bound(double gain, int fan_in) {
  if (!(gain > 0.0) || fan_in < 1) throw std::invalid_argument("kaiming_bound: gain > 0 and fan_in >= 1 required");
  return gain * std::sqrt(3.0 / static_cast<double>(fan_in));
}

/// Dense NCHW tensor.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_, double fill = 0.0)
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
  std::size_t sample_size() const noexcept { return static_cast<std::size_t>(c) * plane(); }
  double* sample(int i) noexcept { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  const double* sample(int i) const noexcept { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  double& at(int i, int ch, int y, int x) noexcept {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }
  double at(int i, int ch, int y, int x) const noexcept {
    return data[((static_cast<std::size_t>(i) * c + ch) * h + y) * w + x];
  }
  bool all_finite() const noexcept {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

struct ImageBatch {
  Tensor images;
  std::vector<int> labels;  // empty or one per image
};

struct Conv2d {
  int in = 0, out = 0, kernel = 1, stride = 1, pad = 0;
  Matrix weight;  // out x (in * kernel * kernel), column order (channel, ky, kx)
  Vector bias;

  int fan_in() const noexcept { return in * kernel * kernel; }
};

/// Optional ReLU, convolution, optional batch normalization.
struct ConvUnit {
  Conv2d conv;
  bool pre_relu = true;
  bool has_bn = true;
  Vector bn_scale;
  Vector bn_shift;
};

struct CellBlock {
  int channels = 0;
  std::vector<int> edge_unit;  // per cell edge: ConvUnit index, or -1 for parameter-free ops
};

struct ReductionBlock {
  int conv_a = -1;
  int conv_b = -1;
  int shortcut = -1;
};

using Block = std::variant<CellBlock, ReductionBlock>;

class NonFiniteActivation : public std::runtime_error {
 public:
  NonFiniteActivation(int layer, const std::string& name)
      : std::runtime_error("non-finite activation at layer " + std::to_string(layer) + " (" + name + ")"),
        layer_(layer) {}
  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

struct Network {
  NetworkConfig config;
  CellSpec cell;
  std::vector<ConvUnit> units;  // layer index = position; stem is 0
  std::vector<Block> blocks;
  Vector head_scale;
  Vector head_shift;

  int feature_width() const noexcept { return config.feature_width(); }
};

namespace detail {

inline ConvUnit make_unit(int in, int out, int kernel, int stride, bool pre_relu, bool has_bn) {
  ConvUnit u;
  u.conv.in = in;
  u.conv.out = out;
  u.conv.kernel = kernel;
  u.conv.stride = stride;
  u.conv.pad = kernel / 2;
  u.conv.weight = Matrix::Zero(out, in * kernel * kernel);
  u.conv.bias = Vector::Zero(out);
  u.pre_relu = pre_relu;
  u.has_bn = has_bn;
  if (has_bn) {
    u.bn_scale = Vector::Ones(out);
    u.bn_shift = Vector::Zero(out);
  }
  return u;
}

inline Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

inline Tensor conv2d(const Tensor& x, const Conv2d& conv) {
  if (x.c != conv.in) throw std::invalid_argument("conv2d: channel mismatch");
  const int k = conv.kernel;
  const int ho = (x.h + 2 * conv.pad - k) / conv.stride + 1;
  const int wo = (x.w + 2 * conv.pad - k) / conv.stride + 1;
  const Eigen::Index pixels = static_cast<Eigen::Index>(ho) * wo;
  Tensor y(x.n, conv.out, ho, wo);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat cols(conv.fan_in(), pixels);
  for (int i = 0; i < x.n; ++i) {
    const double* src = x.sample(i);
    for (int ch = 0; ch < conv.in; ++ch)
      for (int ky = 0; ky < k; ++ky)
        for (int kx = 0; kx < k; ++kx) {
          double* row = cols.row((ch * k + ky) * k + kx).data();
          for (int oy = 0; oy < ho; ++oy) {
            const int iy = oy * conv.stride - conv.pad + ky;
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * conv.stride - conv.pad + kx;
              const bool inside = iy >= 0 && iy < x.h && ix >= 0 && ix < x.w;
              row[oy * wo + ox] = inside ? src[(static_cast<std::size_t>(ch) * x.h + iy) * x.w + ix] : 0.0;
            }
          }
        }
    Eigen::Map<RowMat> out(y.sample(i), conv.out, pixels);
    out.noalias() = conv.weight * cols;
    out.colwise() += conv.bias;
  }
  return y;
}

/// Normalizes each channel with the statistics of the current batch.
inline void batch_norm(Tensor& x, const Vector& scale, const Vector& shift, double eps) {
  const double count = static_cast<double>(x.n) * static_cast<double>(x.plane());
  for (int ch = 0; ch < x.c; ++ch) {
    double sum = 0.0;
    for (int i = 0; i < x.n; ++i) {
      const double* p = x.sample(i) + static_cast<std::size_t>(ch) * x.plane();
      for (std::size_t j = 0; j < x.plane(); ++j) sum += p[j];
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (int i = 0; i < x.n; ++i) {
      const double* p = x.sample(i) + static_cast<std::size_t>(ch) * x.plane();
      for (std::size_t j = 0; j < x.plane(); ++j) sq += (p[j] - mean) * (p[j] - mean);
    }
    const double inv = 1.0 / std::sqrt(sq / count + eps);
    const double a = scale[ch] * inv;
    const double b = shift[ch] - mean * a;
    for (int i = 0; i < x.n; ++i) {
      double* p = x.sample(i) + static_cast<std::size_t>(ch) * x.plane();
      for (std::size_t j = 0; j < x.plane(); ++j) p[j] = p[j] * a + b;
    }
  }
}

/// 3x3, stride 1, padding 1; averages over in-bounds taps only.
inline Tensor avg_pool_3x3(const Tensor& x) {
  Tensor y(x.n, x.c, x.h, x.w);
  for (int i = 0; i < x.n; ++i)
    for (int ch = 0; ch < x.c; ++ch)
      for (int oy = 0; oy < x.h; ++oy)
        for (int ox = 0; ox < x.w; ++ox) {
          double sum = 0.0;
          int taps = 0;
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              const int iy = oy + dy, ix = ox + dx;
              if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
              sum += x.at(i, ch, iy, ix);
              ++taps;
            }
          y.at(i, ch, oy, ox) = sum / taps;
        }
  return y;
}

/// 2x2, stride 2.
inline Tensor avg_pool_2x2(const Tensor& x) {
  Tensor y(x.n, x.c, x.h / 2, x.w / 2);
  for (int i = 0; i < x.n; ++i)
    for (int ch = 0; ch < x.c; ++ch)
      for (int oy = 0; oy < y.h; ++oy)
        for (int ox = 0; ox < y.w; ++ox)
          y.at(i, ch, oy, ox) = 0.25 * (x.at(i, ch, 2 * oy, 2 * ox) + x.at(i, ch, 2 * oy, 2 * ox + 1) +
                                        x.at(i, ch, 2 * oy + 1, 2 * ox) + x.at(i, ch, 2 * oy + 1, 2 * ox + 1));
  return y;
}

inline void add_into(Tensor& acc, const Tensor& x) {
  for (std::size_t j = 0; j < acc.data.size(); ++j) acc.data[j] += x.data[j];
}

}  // namespace detail

inline Network build_network(const CellSpec& cell, const NetworkConfig& cfg) {
  cfg.validate();
  if (cell.edges.size() != CellSpec::edge_count(cell.num_nodes))
    throw std::invalid_argument("build_network: cell has wrong edge count");
  Network net;
  net.config = cfg;
  net.cell = cell;
  std::sort(net.cell.edges.begin(), net.cell.edges.end(), [](const Edge& a, const Edge& b) {
    return a.target != b.target ? a.target < b.target : a.source < b.source;
  });
  for (std::size_t i = 0; i < net.cell.edges.size(); ++i) {
    const auto& e = net.cell.edges[i];
    if (e.source < 0 || e.source >= e.target || e.target >= cell.num_nodes ||
        (i > 0 && e.target == net.cell.edges[i - 1].target && e.source == net.cell.edges[i - 1].source))
      throw std::invalid_argument("build_network: cell is not a dense DAG");
  }
  const auto ch = cfg.stage_channels();
  net.units.push_back(detail::make_unit(cfg.in_channels, ch[0], 3, 1, /*pre_relu=*/false, /*has_bn=*/true));
  for (int stage = 0; stage < 3; ++stage) {
    if (stage > 0) {
      ReductionBlock red;
      red.conv_a = static_cast<int>(net.units.size());
      net.units.push_back(detail::make_unit(ch[stage - 1], ch[stage], 3, 2, true, true));
      red.conv_b = static_cast<int>(net.units.size());
      net.units.push_back(detail::make_unit(ch[stage], ch[stage], 3, 1, true, true));
      red.shortcut = static_cast<int>(net.units.size());
      net.units.push_back(detail::make_unit(ch[stage - 1], ch[stage], 1, 1, false, false));
      net.blocks.emplace_back(red);
    }
    for (int n = 0; n < cfg.cells_per_stage; ++n) {
      CellBlock block;
      block.channels = ch[stage];
      for (const auto& e : cell.edges) {
        if (e.op == OpKind::nor_conv_1x1 || e.op == OpKind::nor_conv_3x3) {
          block.edge_unit.push_back(static_cast<int>(net.units.size()));
          const int k = e.op == OpKind::nor_conv_1x1 ? 1 : 3;
          net.units.push_back(detail::make_unit(ch[stage], ch[stage], k, 1, true, true));
        } else {
          block.edge_unit.push_back(-1);
        }
      }
      net.blocks.emplace_back(std::move(block));
    }
  }
  net.head_scale = Vector::Ones(ch[2]);
  net.head_shift = Vector::Zero(ch[2]);
  return net;
}

/// Draws every conv weight (and bias, unless disabled) i.i.d. from U(-b, b),
/// b = gain * sqrt(3 / fan_in), from a stream keyed by (seed, layer index).
/// Resets batch-norm affine parameters to scale 1, shift 0.
inline void kaiming_init(Network& net, const InitSpec& spec) {
  if (!(spec.gain > 0.0)) throw std::invalid_argument("kaiming_init: gain must be positive");
  for (std::size_t layer = 0; layer < net.units.size(); ++layer) {
    auto& unit = net.units[layer];
    const double b = kaiming_bound(spec.gain, unit.conv.fan_in());
    CounterRng rng(hash_combine(spec.seed, layer));
    auto draw = [&] {
      double w = b * rng.symmetric();
      if (std::abs(w) >= b) w = std::copysign(std::nextafter(b, 0.0), w);
      return w;
    };
    // Row-major draw order: output channel, then (in channel, ky, kx).
    for (Eigen::Index o = 0; o < unit.conv.weight.rows(); ++o)
      for (Eigen::Index j = 0; j < unit.conv.weight.cols(); ++j) unit.conv.weight(o, j) = draw();
    for (Eigen::Index o = 0; o < unit.conv.bias.size(); ++o) unit.conv.bias[o] = spec.sample_bias ? draw() : 0.0;
    if (unit.has_bn) {
      unit.bn_scale.setOnes();
      unit.bn_shift.setZero();
    }
  }
  net.head_scale.setOnes();
  net.head_shift.setZero();
}

inline Network kaiming_init(const Network& net, const InitSpec& spec) {
  Network copy = net;
  kaiming_init(copy, spec);
  return copy;
}

namespace detail {

inline Tensor run_unit(const Network& net, int index, const Tensor& x) {
  const auto& unit = net.units[static_cast<std::size_t>(index)];
  Tensor y = unit.pre_relu ? conv2d(relu(x), unit.conv) : conv2d(x, unit.conv);
  if (unit.has_bn) batch_norm(y, unit.bn_scale, unit.bn_shift, net.config.bn_epsilon);
  if (!y.all_finite()) throw NonFiniteActivation(index, "conv unit");
  return y;
}

inline Tensor run_cell(const Network& net, const CellBlock& block, const Tensor& x) {
  const auto& cell = net.cell;
  std::vector<Tensor> nodes;
  nodes.reserve(static_cast<std::size_t>(cell.num_nodes));
  nodes.push_back(x);
  std::size_t e = 0;
  for (int t = 1; t < cell.num_nodes; ++t) {
    Tensor acc(x.n, x.c, x.h, x.w);
    for (int s = 0; s < t; ++s, ++e) {
      const Edge& edge = cell.edges[e];
      const Tensor& in = nodes[static_cast<std::size_t>(edge.source)];
      switch (edge.op) {
        case OpKind::none: break;
        case OpKind::skip_connect: add_into(acc, in); break;
        case OpKind::avg_pool_3x3: add_into(acc, avg_pool_3x3(in)); break;
        case OpKind::nor_conv_1x1:
        case OpKind::nor_conv_3x3: add_into(acc, run_unit(net, block.edge_unit[e], in)); break;
      }
    }
    nodes.push_back(std::move(acc));
  }
  return std::move(nodes.back());
}

}  // namespace detail

/// Global-average-pooled features, one row per image. Labels are carried over.
inline FeatureMatrix forward_features(const Network& net, const ImageBatch& batch) {
  const auto& cfg = net.config;
  const Tensor& x = batch.images;
  if (x.n < 2) throw std::invalid_argument("forward_features: batch needs at least 2 samples");
  if (x.c != cfg.in_channels || x.h != cfg.height || x.w != cfg.width)
    throw std::invalid_argument("forward_features: input shape " + std::to_string(x.c) + "x" + std::to_string(x.h) +
                                "x" + std::to_string(x.w) + " does not match network config");
  if (!batch.labels.empty() && static_cast<int>(batch.labels.size()) != x.n)
    throw std::invalid_argument("forward_features: label count mismatch");

  Tensor h = detail::run_unit(net, 0, x);
  for (const auto& block : net.blocks) {
    if (const auto* cell = std::get_if<CellBlock>(&block)) {
      h = detail::run_cell(net, *cell, h);
    } else {
      const auto& red = std::get<ReductionBlock>(block);
      Tensor main = detail::run_unit(net, red.conv_b, detail::run_unit(net, red.conv_a, h));
      Tensor shortcut = detail::run_unit(net, red.shortcut, detail::avg_pool_2x2(h));
      detail::add_into(main, shortcut);
      h = std::move(main);
    }
  }
  const int head_layer = static_cast<int>(net.units.size());
  detail::batch_norm(h, net.head_scale, net.head_shift, cfg.bn_epsilon);
  h = detail::relu(h);
  if (!h.all_finite()) throw NonFiniteActivation(head_layer, "head");

  FeatureMatrix features{Matrix(h.n, h.c), batch.labels};
  const double inv = 1.0 / static_cast<double>(h.plane());
  for (int i = 0; i < h.n; ++i)
    for (int ch = 0; ch < h.c; ++ch) {
      const double* p = h.sample(i) + static_cast<std::size_t>(ch) * h.plane();
      double sum = 0.0;
      for (std::size_t j = 0; j < h.plane(); ++j) sum += p[j];
      features.values(i, ch) = sum * inv;
    }
  return features;
}

}  // namespace nasgeom
