#pragma once

// Measurement protocol: several Kaiming initializations x several image
// batches -> one centred feature cloud per initialization -> orthogonality and
// intrinsic-dimension measures -> mean/std across initializations. Plus the
// selection rules that filter and rank architectures by those means.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "arch.hpp"
#include "feature_matrix.hpp"
#include "geometry.hpp"
#include "idest.hpp"
#include "network.hpp"
#include "ortho.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "synth.hpp"

namespace nasgeom {

inline constexpr std::string_view kVersion = "0.1.0";

inline const std::vector<std::string>& all_measure_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"f_mean", "f_std", "cmean", "cstd"};
    for (IdMethod m : kAllIdMethods) v.emplace_back(to_string(m));
    return v;
  }();
  return names;
}

inline bool is_measure_name(std::string_view name) {
  const auto& all = all_measure_names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

// ---------------------------------------------------------------------------
// Per-cloud measurement
// ---------------------------------------------------------------------------

struct MeasureResult {
  std::string name;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // ok | IdStatus tag | error
  std::string error;
  std::map<std::string, double> diagnostics;

  bool has_value() const noexcept { return std::isfinite(value); }
};

/// Measures one cloud. The cloud is centred here; `names` empty means all measures.
/// Failures are recorded per measure and never abort the others.
inline std::vector<MeasureResult> measure_cloud(const FeatureMatrix& features, const std::vector<std::string>& names,
                                                const EstimatorParams& params) {
  const auto& wanted = names.empty() ? all_measure_names() : names;
  for (const auto& n : wanted)
    if (!is_measure_name(n)) throw std::invalid_argument("unknown measure '" + n + "'");
  auto want = [&](std::string_view n) { return std::find(wanted.begin(), wanted.end(), n) != wanted.end(); };
  const FeatureMatrix x = center(features);
  std::map<std::string, MeasureResult> out;
  auto fail = [&](const std::string& n, const std::string& why) {
    MeasureResult r;
    r.name = n;
    r.status = "error";
    r.error = why;
    out[n] = r;
  };

  if (want("f_mean") || want("f_std")) {
    try {
      const auto s = pairwise_angle_stats(x.values);
      out["f_mean"] = {"f_mean", s.mean};
      out["f_std"] = {"f_std", s.std};
    } catch (const std::exception& e) {
      fail("f_mean", e.what());
      fail("f_std", e.what());
    }
  }
  if (want("cmean") || want("cstd")) {
    try {
      if (!x.has_labels()) throw std::invalid_argument("features carry no class labels");
      const auto s = centroid_angle_stats(x.values, x.labels);
      out["cmean"] = {"cmean", s.mean};
      out["cstd"] = {"cstd", s.std};
    } catch (const std::exception& e) {
      fail("cmean", e.what());
      fail("cstd", e.what());
    }
  }

  bool any_id = false;
  for (IdMethod m : kAllIdMethods) any_id = any_id || want(to_string(m));
  if (any_id) {
    std::optional<IdContext> ctx;
    std::string ctx_error;
    try {
      ctx.emplace(x.values, params);
    } catch (const std::exception& e) {
      ctx_error = e.what();
    }
    std::optional<MindEstimates> mind;
    for (IdMethod m : kAllIdMethods) {
      const std::string name(to_string(m));
      if (!want(name)) continue;
      if (!ctx) {
        fail(name, ctx_error);
        continue;
      }
      try {
        IdEstimate est;
        if (m == IdMethod::mind_mli || m == IdMethod::mind_mlk) {
          if (!mind) mind = estimate_mind_ml(*ctx, params);
          est = m == IdMethod::mind_mli ? mind->mli : mind->mlk;
        } else {
          est = estimate(m, *ctx, params);
        }
        MeasureResult r;
        r.name = name;
        r.diagnostics = est.diagnostics;
        if (!est.excluded.empty()) r.diagnostics["excluded_points"] = static_cast<double>(est.excluded.size());
        if (est.status == IdStatus::ok) {
          r.value = est.value;
        } else {
          r.status = std::string(to_string(est.status));
          r.error = est.note;
          if (est.status == IdStatus::unstable) r.value = est.value;
        }
        out[name] = r;
      } catch (const std::exception& e) {
        fail(name, e.what());
      }
    }
  }

  std::vector<MeasureResult> ordered;
  for (const auto& n : wanted) ordered.push_back(out.at(n));
  return ordered;
}

// ---------------------------------------------------------------------------
// Aggregation types
// ---------------------------------------------------------------------------

/// One measure across initializations.
struct MeasureStat {
  std::vector<double> per_init;  // NaN where that init failed
  std::vector<std::string> errors;    // one entry per failed init: "init <r>: <reason>"
  std::vector<std::string> warnings;  // value kept but flagged (e.g. clamped unstable estimate)
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();

  int failures() const noexcept { return static_cast<int>(errors.size()); }
  bool has_value() const noexcept { return std::isfinite(mean); }
};

/// Population mean/std over the finite entries, summed in index order.
inline void aggregate(MeasureStat& s) {
  double sum = 0.0;
  int count = 0;
  for (double v : s.per_init)
    if (std::isfinite(v)) {
      sum += v;
      ++count;
    }
  if (count == 0) {
    s.mean = s.std = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  s.mean = sum / count;
  double sq = 0.0;
  for (double v : s.per_init)
    if (std::isfinite(v)) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / count);
}

using MeasureVector = std::map<std::string, MeasureStat>;

struct Provenance {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> init_seeds;
  std::vector<std::uint64_t> batch_ids;
  std::uint64_t config_hash = 0;
  std::string data_source;
};

struct ArchScore {
  std::string arch;
  MeasureVector measures;
  std::map<std::string, bool> verdicts;
  Provenance provenance;
  std::vector<std::string> init_errors;  // inits aborted before measuring (e.g. non-finite forward pass)
};

// ---------------------------------------------------------------------------
// Selection rules
// ---------------------------------------------------------------------------

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

enum class Polarity { keep, drop };

struct FilterRule {
  std::string measure;
  std::vector<Interval> intervals;
  Polarity polarity = Polarity::keep;

  /// keep: value inside some interval; drop: value inside none.
  bool passes(double value) const noexcept {
    bool inside = false;
    for (const auto& iv : intervals) inside = inside || iv.contains(value);
    return polarity == Polarity::keep ? inside : !inside;
  }

  void validate() const {
    if (!is_measure_name(measure)) throw std::invalid_argument("rule references unknown measure '" + measure + "'");
    for (const auto& iv : intervals)
      if (!(iv.lo <= iv.hi)) throw std::invalid_argument("rule on '" + measure + "' has an interval with lo > hi");
  }
};

struct RuleSet {
  std::string name;
  std::vector<FilterRule> rules;
};

inline FilterRule at_most(std::string measure, double hi) { return {std::move(measure), {{-std::numeric_limits<double>::infinity(), hi}}, Polarity::keep}; }

/// "avoid-low": keep the low-ID region where low performers are rare.
/// "top-band": FisherS in [1.5, 2.5] and f_mean in [85, 88] or [90, 92.5].
inline std::vector<RuleSet> default_rules() {
  RuleSet avoid{"avoid-low",
                {at_most("fishers", 2.5), at_most("lpca", 2.5), at_most("mind_mli", 8.0), at_most("mind_mlk", 8.0),
                 at_most("corrint", 5.0), at_most("mle", 6.0), at_most("mom", 6.0), at_most("mada", 6.0),
                 at_most("twonn", 8.0)}};
  RuleSet band{"top-band",
               {{"fishers", {{1.5, 2.5}}, Polarity::keep}, {"f_mean", {{85.0, 88.0}, {90.0, 92.5}}, Polarity::keep}}};
  return {avoid, band};
}

/// Named rule set: a default set or "none" (empty, keeps everything).
inline RuleSet rule_set_by_name(std::string_view name) {
  if (name == "none") return {"none", {}};
  for (auto& rs : default_rules())
    if (rs.name == name) return rs;
  throw std::invalid_argument("unknown rule set '" + std::string(name) + "'");
}

struct Verdict {
  bool keep = true;
  std::vector<std::string> reasons;  // one per failed rule
};

/// Conjunction of the rules on measure means. A measure with no value fails its rule.
inline Verdict apply_rules(const ArchScore& score, const RuleSet& rules) {
  Verdict v;
  for (const auto& rule : rules.rules) {
    const auto it = score.measures.find(rule.measure);
    if (it == score.measures.end())
      throw std::invalid_argument("rule references measure '" + rule.measure + "' absent from score of " + score.arch);
    if (!it->second.has_value()) {
      v.keep = false;
      v.reasons.push_back(rule.measure + " unavailable");
    } else if (!rule.passes(it->second.mean)) {
      v.keep = false;
      std::ostringstream os;
      os << rule.measure << "=" << it->second.mean;
      v.reasons.push_back(os.str());
    }
  }
  return v;
}

/// Orders by the mean of `key`; scores lacking that value go last; ties by arch string.
inline std::vector<ArchScore> rank(std::vector<ArchScore> scores, const std::string& key, bool descending = false) {
  auto value = [&](const ArchScore& s) -> std::optional<double> {
    const auto it = s.measures.find(key);
    if (it == s.measures.end() || !it->second.has_value()) return std::nullopt;
    return it->second.mean;
  };
  std::stable_sort(scores.begin(), scores.end(), [&](const ArchScore& a, const ArchScore& b) {
    const auto va = value(a), vb = value(b);
    if (va.has_value() != vb.has_value()) return va.has_value();
    if (va && *va != *vb) return descending ? *va > *vb : *va < *vb;
    return a.arch < b.arch;
  });
  return scores;
}

// ---------------------------------------------------------------------------
// Data sources
// ---------------------------------------------------------------------------

class DataSource {
 public:
  virtual ~DataSource() = default;
  /// Batch `index` of `size` images; must be a pure function of its arguments.
  virtual ImageBatch batch(std::uint64_t index, int size) const = 0;
  virtual ImageShape shape() const = 0;
  virtual std::string describe() const = 0;
};

class SyntheticImageSource final : public DataSource {
 public:
  SyntheticImageSource(ImageShape shape, std::uint64_t seed, int classes = 10)
      : shape_(shape), seed_(seed), classes_(classes) {}

  ImageBatch batch(std::uint64_t index, int size) const override {
    return synth_images(size, shape_, hash_combine(seed_, index), classes_);
  }
  ImageShape shape() const override { return shape_; }
  std::string describe() const override {
    return "synthetic:" + std::to_string(shape_.channels) + "x" + std::to_string(shape_.height) + "x" +
           std::to_string(shape_.width) + ":seed=" + std::to_string(seed_);
  }

 private:
  ImageShape shape_;
  std::uint64_t seed_;
  int classes_;
};

/// Draws batches without replacement from an in-memory image set.
class DatasetSource final : public DataSource {
 public:
  DatasetSource(ImageBatch images, std::uint64_t seed, std::string name)
      : images_(std::move(images)), seed_(seed), name_(std::move(name)) {}

  ImageBatch batch(std::uint64_t index, int size) const override {
    const int total = images_.images.n;
    if (size > total)
      throw std::invalid_argument("batch size " + std::to_string(size) + " exceeds dataset size " + std::to_string(total));
    std::vector<int> perm(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) perm[static_cast<std::size_t>(i)] = i;
    CounterRng rng(hash_combine(seed_, index));
    for (int i = 0; i < size; ++i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(total - i))]);
    const auto& src = images_.images;
    ImageBatch out;
    out.images = Tensor(size, src.c, src.h, src.w);
    for (int i = 0; i < size; ++i) {
      const int from = perm[static_cast<std::size_t>(i)];
      std::copy(src.sample(from), src.sample(from) + src.sample_size(), out.images.sample(i));
      if (!images_.labels.empty()) out.labels.push_back(images_.labels[static_cast<std::size_t>(from)]);
    }
    return out;
  }
  ImageShape shape() const override { return {images_.images.c, images_.images.h, images_.images.w}; }
  std::string describe() const override { return name_ + ":seed=" + std::to_string(seed_); }

 private:
  ImageBatch images_;
  std::uint64_t seed_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

enum class CloudMode { concatenate, per_batch };

struct ScoreConfig {
  int inits = 3;
  int batches = 1;
  int batch_size = 64;
  std::uint64_t master_seed = 0;
  NetworkConfig network;
  double gain = std::numbers::sqrt2;
  bool sample_bias = true;
  EstimatorParams estimators;
  std::vector<std::string> measures;  // empty: all
  CloudMode mode = CloudMode::concatenate;

  /// The paper-scale protocol: 50 inits, 10 batches of 128, five cells per stage.
  static ScoreConfig paper() {
    ScoreConfig c;
    c.inits = 50;
    c.batches = 10;
    c.batch_size = 128;
    c.network.cells_per_stage = 5;
    return c;
  }

  void validate() const {
    if (inits < 1) throw std::invalid_argument("inits must be >= 1");
    if (batches < 1) throw std::invalid_argument("batches must be >= 1");
    if (batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
    network.validate();
    estimators.validate();
    for (const auto& m : measures)
      if (!is_measure_name(m)) throw std::invalid_argument("unknown measure '" + m + "'");
  }

  /// Canonical text of every field that influences results.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "inits=" << inits << ";batches=" << batches << ";batch_size=" << batch_size << ";seed=" << master_seed
       << ";cells=" << network.cells_per_stage << ";channels=" << network.initial_channels
       << ";input=" << network.in_channels << "x" << network.height << "x" << network.width
       << ";bn_eps=" << network.bn_epsilon << ";gain=" << gain << ";bias=" << sample_bias
       << ";mode=" << (mode == CloudMode::concatenate ? "concatenate" : "per_batch") << ";measures=";
    for (const auto& m : measures) os << m << ",";
    const auto& e = estimators;
    os << ";alphas=";
    for (double a : e.alpha_grid) os << a << ",";
    os << ";pca=" << e.fishers_variance_threshold << ";alpha_factor=" << e.alpha_selection_factor
       << ";lpca=" << e.lpca_alpha << ";corrint=" << e.corrint_k1 << "/" << e.corrint_k2 << ";mle=" << e.mle_k
       << ";mada=" << e.mada_k << ";mom=" << e.mom_k << ";mind=" << e.mind_k << ";knn=" << e.knn_k << ";knn_sizes=";
    for (int s : e.knn_subset_sizes) os << s << ",";
    os << ";knn_seed=" << e.knn_seed << ";twonn=" << e.twonn_discard << ";max_excl=" << e.max_excluded_fraction;
    return os.str();
  }

  std::uint64_t hash() const { return hash_string(canonical()); }
};

/// Init seed = hash(master_seed, arch string, init index).
inline std::uint64_t init_seed(std::uint64_t master_seed, std::string_view arch, int init_index) {
  return hash_combine(hash_combine(master_seed, hash_string(arch)), static_cast<std::uint64_t>(init_index));
}

/// Features of every batch for one initialization; concatenated row-wise in batch order.
inline std::vector<FeatureMatrix> extract_init_features(const Network& net, const DataSource& source,
                                                        const ScoreConfig& cfg) {
  std::vector<FeatureMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(cfg.batches));
  for (int b = 0; b < cfg.batches; ++b)
    blocks.push_back(forward_features(net, source.batch(static_cast<std::uint64_t>(b), cfg.batch_size)));
  return blocks;
}

/// Initialized network for (arch, init index) under cfg.
inline Network initialized_network(const CellSpec& cell, const std::string& arch, int init_index, const ScoreConfig& cfg) {
  Network net = build_network(cell, cfg.network);
  kaiming_init(net, InitSpec{cfg.gain, init_seed(cfg.master_seed, arch, init_index), cfg.sample_bias});
  return net;
}

namespace detail {

struct InitOutcome {
  std::vector<MeasureResult> results;
  std::string error;  // non-empty: init aborted
};

inline InitOutcome run_init(const CellSpec& cell, const std::string& arch, int r, const DataSource& source,
                            const ScoreConfig& cfg) {
  InitOutcome out;
  try {
    const Network net = initialized_network(cell, arch, r, cfg);
    auto blocks = extract_init_features(net, source, cfg);
    if (cfg.mode == CloudMode::concatenate) {
      out.results = measure_cloud(vstack(blocks), cfg.measures, cfg.estimators);
    } else {
      // Per-batch measures, averaged over the batches that succeeded.
      std::vector<std::vector<MeasureResult>> per_batch;
      for (const auto& b : blocks) per_batch.push_back(measure_cloud(b, cfg.measures, cfg.estimators));
      out.results = per_batch.front();
      for (std::size_t m = 0; m < out.results.size(); ++m) {
        double sum = 0.0;
        int ok = 0;
        for (const auto& pb : per_batch)
          if (pb[m].has_value()) {
            sum += pb[m].value;
            ++ok;
          }
        out.results[m].value = ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
        if (ok > 0) {
          out.results[m].status = "ok";
          out.results[m].error.clear();
        }
      }
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

inline ArchScore assemble(const std::string& arch, const ScoreConfig& cfg, const DataSource& source,
                          const std::vector<InitOutcome>& inits) {
  ArchScore score;
  score.arch = arch;
  const auto& names = cfg.measures.empty() ? all_measure_names() : cfg.measures;
  for (const auto& n : names) score.measures[n].per_init.assign(static_cast<std::size_t>(cfg.inits), std::numeric_limits<double>::quiet_NaN());
  for (int r = 0; r < cfg.inits; ++r) {
    const auto& init = inits[static_cast<std::size_t>(r)];
    if (!init.error.empty()) {
      score.init_errors.push_back("init " + std::to_string(r) + ": " + init.error);
      for (auto& [n, stat] : score.measures) stat.errors.push_back("init " + std::to_string(r) + ": aborted");
      continue;
    }
    for (const auto& res : init.results) {
      auto& stat = score.measures[res.name];
      const std::string what = "init " + std::to_string(r) + ": " + res.status + (res.error.empty() ? "" : ": " + res.error);
      if (res.status == "ok") {
        stat.per_init[static_cast<std::size_t>(r)] = res.value;
      } else if (res.has_value()) {
        stat.per_init[static_cast<std::size_t>(r)] = res.value;
        stat.warnings.push_back(what);
      } else {
        stat.errors.push_back(what);
      }
    }
  }
  for (auto& [n, stat] : score.measures) aggregate(stat);

  score.provenance.master_seed = cfg.master_seed;
  score.provenance.config_hash = cfg.hash();
  score.provenance.data_source = source.describe();
  for (int r = 0; r < cfg.inits; ++r) score.provenance.init_seeds.push_back(init_seed(cfg.master_seed, arch, r));
  for (int b = 0; b < cfg.batches; ++b) score.provenance.batch_ids.push_back(static_cast<std::uint64_t>(b));

  for (const auto& rs : default_rules()) {
    bool applicable = true;
    for (const auto& rule : rs.rules) applicable = applicable && score.measures.count(rule.measure) > 0;
    if (applicable) score.verdicts[rs.name] = apply_rules(score, rs).keep;
  }
  return score;
}

}  // namespace detail

/// Scores many architectures; (arch, init) pairs are distributed over `workers`
/// threads and reduced in a fixed order, so results do not depend on the worker count.
inline std::vector<ArchScore> score_architectures(const std::vector<std::string>& archs, const DataSource& source,
                                                  const ScoreConfig& cfg, unsigned workers = default_workers()) {
  cfg.validate();
  const ImageShape shape = source.shape();
  if (shape.channels != cfg.network.in_channels || shape.height != cfg.network.height || shape.width != cfg.network.width)
    throw std::invalid_argument("data source image shape does not match network input shape");
  std::vector<CellSpec> cells;
  cells.reserve(archs.size());
  for (const auto& a : archs) cells.push_back(parse_arch_string(a));
  const auto per_arch = static_cast<std::size_t>(cfg.inits);
  std::vector<detail::InitOutcome> outcomes(archs.size() * per_arch);
  parallel_for(outcomes.size(), workers, [&](std::size_t task) {
    const std::size_t a = task / per_arch;
    const int r = static_cast<int>(task % per_arch);
    outcomes[task] = detail::run_init(cells[a], archs[a], r, source, cfg);
  });
  std::vector<ArchScore> scores;
  scores.reserve(archs.size());
  for (std::size_t a = 0; a < archs.size(); ++a) {
    std::vector<detail::InitOutcome> inits(outcomes.begin() + static_cast<std::ptrdiff_t>(a * per_arch),
                                           outcomes.begin() + static_cast<std::ptrdiff_t>((a + 1) * per_arch));
    scores.push_back(detail::assemble(archs[a], cfg, source, inits));
  }
  return scores;
}

inline ArchScore score_architecture(const std::string& arch, const DataSource& source, const ScoreConfig& cfg,
                                    unsigned workers = default_workers()) {
  return score_architectures({arch}, source, cfg, workers).front();
}

/// Number of measures with at least one failed initialization.
inline int hard_failures(const ArchScore& score) {
  int n = 0;
  for (const auto& [name, stat] : score.measures)
    if (stat.failures() > 0) ++n;
  return n;
}

}  // namespace nasgeom
