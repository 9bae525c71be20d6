#pragma once

// Intrinsic-dimension estimators.
//
//   fishers   Fisher separability, inverted through the Lambert W function
//   lpca      Fukunaga-Olsen eigenvalue threshold
//   corrint   Grassberger-Procaccia correlation dimension between two radii
//   mle       Levina-Bickel with MacKay-Ghahramani averaging
//   mada      manifold-adaptive, ln 2 / ln(T_k / T_{k/2})
//   mom       method of moments on the k neighbor distances
//   twonn     ratio of second to first neighbor distance
//   mind_mli  MiND maximum likelihood, integer dimension
//   mind_mlk  MiND maximum likelihood, continuous dimension
//   knn       Carter / Costa-Hero kNN-graph length growth
//
// The kNN-family estimators read a shared NeighborTable through IdContext.
// Hard failures throw EstimatorError; soft outcomes (fully separable cloud,
// unstable regression) come back as an IdEstimate with a non-ok status.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "feature_matrix.hpp"
#include "geometry.hpp"
#include "lambert_w.hpp"
#include "rng.hpp"

namespace nasgeom {

enum class IdMethod { fishers, corrint, knn, lpca, mada, mind_mli, mind_mlk, mle, mom, twonn };

inline constexpr std::array<IdMethod, 10> kAllIdMethods = {
    IdMethod::fishers, IdMethod::corrint,  IdMethod::knn, IdMethod::lpca, IdMethod::mada,
    IdMethod::mind_mli, IdMethod::mind_mlk, IdMethod::mle, IdMethod::mom,  IdMethod::twonn};

constexpr std::string_view to_string(IdMethod m) noexcept {
  switch (m) {
    case IdMethod::fishers: return "fishers";
    case IdMethod::corrint: return "corrint";
    case IdMethod::knn: return "knn";
    case IdMethod::lpca: return "lpca";
    case IdMethod::mada: return "mada";
    case IdMethod::mind_mli: return "mind_mli";
    case IdMethod::mind_mlk: return "mind_mlk";
    case IdMethod::mle: return "mle";
    case IdMethod::mom: return "mom";
    case IdMethod::twonn: return "twonn";
  }
  return "?";
}

inline std::optional<IdMethod> id_method_from_string(std::string_view s) {
  for (IdMethod m : kAllIdMethods)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

enum class IdStatus { ok, fully_separable, unstable };

constexpr std::string_view to_string(IdStatus s) noexcept {
  switch (s) {
    case IdStatus::ok: return "ok";
    case IdStatus::fully_separable: return "fully-separable";
    case IdStatus::unstable: return "unstable";
  }
  return "?";
}

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IdEstimate {
  IdMethod method{};
  double value = std::numeric_limits<double>::quiet_NaN();
  IdStatus status = IdStatus::ok;
  std::map<std::string, double> diagnostics;
  std::vector<Eigen::Index> excluded;  // points dropped as degenerate
  std::string note;

  /// A finite value is available (ok, or unstable-but-clamped).
  bool has_value() const noexcept { return std::isfinite(value); }
};

struct FisherSProfile {
  std::vector<double> alpha_grid;
  std::vector<double> inseparability;  // mean fraction of other points each point fails to separate from
  std::vector<double> dimension;       // Lambert-W inversion at each alpha; NaN where inseparability is 0
  double chosen_alpha = std::numeric_limits<double>::quiet_NaN();
  int retained_n = 0;
};

inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.6 + 0.02 * i);
  return grid;
}

struct EstimatorParams {
  std::vector<double> alpha_grid = default_alpha_grid();
  double fishers_variance_threshold = 0.99;
  double alpha_selection_factor = 0.8;
  double lpca_alpha = 0.05;
  int corrint_k1 = 10;
  int corrint_k2 = 20;
  int mle_k = 20;
  int mada_k = 20;
  int mom_k = 20;
  int mind_k = 10;
  int knn_k = 5;
  std::vector<int> knn_subset_sizes;  // empty: {N/8, N/4, N/2, N}
  std::uint64_t knn_seed = 0;
  double twonn_discard = 0.1;
  double max_excluded_fraction = 0.2;

  void validate() const {
    for (int k : {corrint_k1, corrint_k2, mle_k, mada_k, mom_k, mind_k, knn_k})
      if (k < 2) throw std::invalid_argument("estimator neighbor counts must be >= 2");
    if (corrint_k1 >= corrint_k2) throw std::invalid_argument("corrint: k1 must be < k2");
    if (mada_k % 2 != 0) throw std::invalid_argument("mada: k must be even");
    if (!(twonn_discard >= 0.0 && twonn_discard < 0.5)) throw std::invalid_argument("twonn: discard fraction in [0, 0.5)");
    if (alpha_grid.empty()) throw std::invalid_argument("fishers: empty alpha grid");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
      if (!(alpha_grid[i] > 0.0 && alpha_grid[i] < 1.0)) throw std::invalid_argument("fishers: alpha must lie in (0, 1)");
      if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) throw std::invalid_argument("fishers: alpha grid must ascend");
    }
  }

  /// Largest neighbor index any table-based estimator reads.
  int table_k() const { return std::max({corrint_k2, mle_k, mada_k, mom_k, mind_k + 1, 2}); }
};

/// Data, exact distances, and one NeighborTable shared by all estimators.
class IdContext {
 public:
  IdContext(const Matrix& x, const EstimatorParams& params)
      : x_(x), dist_(pairwise_distances(x)) {
    const int k = std::min<int>(params.table_k(), static_cast<int>(x.rows()) - 1);
    table_ = knn(dist_, k);
  }

  const Matrix& data() const noexcept { return x_; }
  const DistanceMatrix& distances() const noexcept { return dist_; }
  const NeighborTable& table() const noexcept { return table_; }
  Eigen::Index size() const noexcept { return x_.rows(); }

  void require_k(int k, std::string_view who) const {
    if (k > table_.k)
      throw EstimatorError(std::string(who) + ": needs N > " + std::to_string(k) + " points, got " +
                           std::to_string(size()));
  }

 private:
  Matrix x_;
  DistanceMatrix dist_;
  NeighborTable table_;
};

namespace detail {

inline void check_exclusions(const IdEstimate& est, Eigen::Index n, double max_fraction) {
  if (static_cast<double>(est.excluded.size()) > max_fraction * static_cast<double>(n))
    throw EstimatorError(std::string(to_string(est.method)) + ": " + std::to_string(est.excluded.size()) + " of " +
                         std::to_string(n) + " points excluded as degenerate");
}

inline double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fisher separability
// ---------------------------------------------------------------------------

/// Probability that a point of the uniform n-sphere fails the Fisher condition at alpha.
inline double fisher_inseparability_closed_form(double alpha, double n) {
  return std::pow(1.0 - alpha * alpha, (n - 1.0) / 2.0) / (alpha * std::sqrt(2.0 * std::numbers::pi * n));
}

/// Dimension whose closed-form inseparability at alpha equals p.
inline double fisher_dimension(double alpha, double p) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("fisher_dimension: alpha in (0, 1)");
  if (!(p > 0.0)) throw std::domain_error("fisher_dimension: p must be positive");
  const double a2 = alpha * alpha;
  const double l = -std::log1p(-a2);
  const double arg = l / (2.0 * std::numbers::pi * p * p * a2 * (1.0 - a2));
  return lambert_w0(arg) / l;
}

/// Inseparability profile of unit-norm rows: for each alpha, the mean over
/// points x of the fraction of other points y with (x, y) > alpha (x, x).
inline std::vector<double> fisher_inseparability_profile(const Matrix& sphere, const std::vector<double>& alphas) {
  const Eigen::Index n = sphere.rows();
  if (n < 2) throw EstimatorError("fishers: need at least 2 points after preprocessing");
  const Matrix gram = sphere * sphere.transpose();
  std::vector<double> total(alphas.size(), 0.0);
  std::vector<std::int64_t> counts(alphas.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    const double self = gram(i, i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double g = gram(i, j);
      // Alphas with g > alpha * self form a prefix of the ascending grid.
      const auto end = std::partition_point(alphas.begin(), alphas.end(), [&](double a) { return g > a * self; });
      for (auto it = alphas.begin(); it != end; ++it) ++counts[static_cast<std::size_t>(it - alphas.begin())];
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) total[a] += static_cast<double>(counts[a]) / static_cast<double>(n - 1);
  }
  for (double& t : total) t /= static_cast<double>(n);
  return total;
}

inline IdEstimate estimate_fishers(const Matrix& x, const EstimatorParams& params, FisherSProfile* profile_out = nullptr) {
  if (x.rows() < 3) throw EstimatorError("fishers: need at least 3 rows");
  IdEstimate est;
  est.method = IdMethod::fishers;
  SphereCloud cloud;
  try {
    cloud = fishers_preprocess(x, params.fishers_variance_threshold);
  } catch (const std::invalid_argument& e) {
    throw EstimatorError(std::string("fishers: ") + e.what());
  }
  est.excluded = cloud.dropped_rows;
  detail::check_exclusions(est, x.rows(), params.max_excluded_fraction);

  FisherSProfile profile;
  profile.alpha_grid = params.alpha_grid;
  profile.retained_n = cloud.dim;
  profile.inseparability = fisher_inseparability_profile(cloud.points, params.alpha_grid);
  profile.dimension.resize(params.alpha_grid.size(), std::numeric_limits<double>::quiet_NaN());
  std::optional<std::size_t> last_positive;
  for (std::size_t a = 0; a < params.alpha_grid.size(); ++a) {
    if (profile.inseparability[a] > 0.0) {
      profile.dimension[a] = fisher_dimension(params.alpha_grid[a], profile.inseparability[a]);
      last_positive = a;
    }
  }
  est.diagnostics["retained_n"] = cloud.dim;
  est.diagnostics["low_rank"] = cloud.low_rank ? 1.0 : 0.0;
  if (!last_positive) {
    est.status = IdStatus::fully_separable;
    est.note = "every point separable at every alpha";
    if (profile_out) *profile_out = std::move(profile);
    return est;
  }
  const double target = params.alpha_selection_factor * params.alpha_grid[*last_positive];
  std::size_t chosen = 0;
  for (std::size_t a = 1; a < params.alpha_grid.size(); ++a)
    if (std::abs(params.alpha_grid[a] - target) < std::abs(params.alpha_grid[chosen] - target)) chosen = a;
  // Profile is non-increasing, so chosen <= last_positive keeps p > 0.
  profile.chosen_alpha = params.alpha_grid[chosen];
  est.value = profile.dimension[chosen];
  est.diagnostics["alpha"] = profile.chosen_alpha;
  est.diagnostics["inseparability"] = profile.inseparability[chosen];
  est.diagnostics["alpha_max_inseparable"] = params.alpha_grid[*last_positive];
  if (cloud.low_rank) est.note = "retained dimension below 2";
  if (profile_out) *profile_out = std::move(profile);
  return est;
}

// ---------------------------------------------------------------------------
// Global and correlation estimators
// ---------------------------------------------------------------------------

inline IdEstimate estimate_lpca(const Matrix& x, const EstimatorParams& params) {
  if (x.rows() < 2) throw EstimatorError("lpca: need at least 2 rows");
  PcaModel model;
  try {
    model = pca(x, 1.0);
  } catch (const std::invalid_argument&) {
    throw EstimatorError("lpca: zero total variance");
  }
  IdEstimate est;
  est.method = IdMethod::lpca;
  const double cut = params.lpca_alpha * model.eigenvalues[0];
  int count = 0;
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i)
    if (model.eigenvalues[i] > cut) ++count;
  est.value = count;
  est.diagnostics["largest_eigenvalue"] = model.eigenvalues[0];
  return est;
}

inline IdEstimate estimate_corrint(const IdContext& ctx, const EstimatorParams& params) {
  ctx.require_k(params.corrint_k2, "corrint");
  const Eigen::Index n = ctx.size();
  std::vector<double> t1(static_cast<std::size_t>(n)), t2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    t1[static_cast<std::size_t>(i)] = ctx.table().nth(i, params.corrint_k1);
    t2[static_cast<std::size_t>(i)] = ctx.table().nth(i, params.corrint_k2);
  }
  const double r1 = detail::median(t1);
  const double r2 = detail::median(t2);
  if (!(r1 > 0.0) || !(r2 > r1)) throw EstimatorError("corrint: degenerate radii (zero or equal scales)");
  std::int64_t c1 = 0, c2 = 0;
  const auto& d = ctx.distances();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = d(i, j);
      if (v < r1) ++c1;
      if (v < r2) ++c2;
    }
  if (c1 == 0) throw EstimatorError("corrint: empty correlation sum");
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  IdEstimate est;
  est.method = IdMethod::corrint;
  est.value = (std::log(static_cast<double>(c2) / pairs) - std::log(static_cast<double>(c1) / pairs)) /
              (std::log(r2) - std::log(r1));
  est.diagnostics["r1"] = r1;
  est.diagnostics["r2"] = r2;
  return est;
}

// ---------------------------------------------------------------------------
// Local kNN estimators
// ---------------------------------------------------------------------------

inline IdEstimate estimate_mle(const IdContext& ctx, const EstimatorParams& params) {
  const int k = params.mle_k;
  ctx.require_k(k, "mle");
  IdEstimate est;
  est.method = IdMethod::mle;
  double sum_inverse = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < ctx.size(); ++i) {
    const auto& t = ctx.table();
    if (t.nth(i, 1) == 0.0) {
      est.excluded.push_back(i);
      continue;
    }
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += std::log(t.nth(i, k) / t.nth(i, j));
    sum_inverse += s / static_cast<double>(k - 1);
    ++used;
  }
  detail::check_exclusions(est, ctx.size(), params.max_excluded_fraction);
  const double mean_inverse = sum_inverse / static_cast<double>(used);
  if (!(mean_inverse > 0.0)) throw EstimatorError("mle: all neighbor distances equal");
  est.value = 1.0 / mean_inverse;
  return est;
}

inline IdEstimate estimate_mada(const IdContext& ctx, const EstimatorParams& params) {
  const int k = params.mada_k;
  if (k % 2 != 0) throw EstimatorError("mada: k must be even");
  ctx.require_k(k, "mada");
  IdEstimate est;
  est.method = IdMethod::mada;
  double sum = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < ctx.size(); ++i) {
    const double half = ctx.table().nth(i, k / 2);
    const double full = ctx.table().nth(i, k);
    if (!(half > 0.0) || !(full > half)) {
      est.excluded.push_back(i);
      continue;
    }
    sum += std::numbers::ln2 / std::log(full / half);
    ++used;
  }
  detail::check_exclusions(est, ctx.size(), params.max_excluded_fraction);
  if (used == 0) throw EstimatorError("mada: no usable points");
  est.value = sum / static_cast<double>(used);
  return est;
}

inline IdEstimate estimate_mom(const IdContext& ctx, const EstimatorParams& params) {
  const int k = params.mom_k;
  ctx.require_k(k, "mom");
  IdEstimate est;
  est.method = IdMethod::mom;
  double sum = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < ctx.size(); ++i) {
    double m1 = 0.0;
    for (int j = 1; j <= k; ++j) m1 += ctx.table().nth(i, j);
    m1 /= static_cast<double>(k);
    const double w = ctx.table().nth(i, k);
    if (!(w - m1 > 1e-12 * w)) {
      est.excluded.push_back(i);
      continue;
    }
    sum += m1 / (w - m1);
    ++used;
  }
  detail::check_exclusions(est, ctx.size(), params.max_excluded_fraction);
  if (used == 0) throw EstimatorError("mom: no usable points");
  est.value = sum / static_cast<double>(used);
  return est;
}

inline IdEstimate estimate_twonn(const IdContext& ctx, const EstimatorParams& params) {
  if (ctx.size() < 20) throw EstimatorError("twonn: too few points (need N >= 20)");
  ctx.require_k(2, "twonn");
  IdEstimate est;
  est.method = IdMethod::twonn;
  std::vector<double> mu;
  for (Eigen::Index i = 0; i < ctx.size(); ++i) {
    const double t1 = ctx.table().nth(i, 1);
    if (!(t1 > 0.0)) {
      est.excluded.push_back(i);
      continue;
    }
    mu.push_back(ctx.table().nth(i, 2) / t1);
  }
  detail::check_exclusions(est, ctx.size(), params.max_excluded_fraction);
  std::sort(mu.begin(), mu.end());
  const std::size_t n = mu.size();
  const auto keep = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - params.twonn_discard)));
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < keep && i < n; ++i) {
    const double f = static_cast<double>(i + 1) / static_cast<double>(n);
    if (f >= 1.0) break;
    const double lx = std::log(mu[i]);
    const double ly = -std::log1p(-f);
    sxy += lx * ly;
    sxx += lx * lx;
  }
  if (!(sxx > 0.0)) throw EstimatorError("twonn: all distance ratios equal 1");
  est.value = sxy / sxx;
  est.diagnostics["points_fitted"] = static_cast<double>(keep);
  return est;
}

/// MiND log-likelihood (up to a constant) of dimension d for ratios rho_i = T_1 / T_{k+1}.
inline double mind_log_likelihood(const std::vector<double>& rho, int k, double d) {
  double sum = 0.0;
  for (double r : rho) sum += std::log(d) + (d - 1.0) * std::log(r) + (k - 1) * std::log1p(-std::pow(r, d));
  return sum;
}

struct MindEstimates {
  IdEstimate mli;
  IdEstimate mlk;
};

inline MindEstimates estimate_mind_ml(const IdContext& ctx, const EstimatorParams& params) {
  const int k = params.mind_k;
  ctx.require_k(k + 1, "mind_ml");
  MindEstimates out;
  out.mli.method = IdMethod::mind_mli;
  out.mlk.method = IdMethod::mind_mlk;
  std::vector<double> rho;
  std::vector<Eigen::Index> excluded;
  for (Eigen::Index i = 0; i < ctx.size(); ++i) {
    const double outer = ctx.table().nth(i, k + 1);
    const double r = outer > 0.0 ? ctx.table().nth(i, 1) / outer : 0.0;
    if (!(r > 0.0 && r < 1.0)) {
      excluded.push_back(i);
      continue;
    }
    rho.push_back(r);
  }
  out.mli.excluded = out.mlk.excluded = excluded;
  detail::check_exclusions(out.mli, ctx.size(), params.max_excluded_fraction);
  const int ambient = static_cast<int>(ctx.data().cols());
  int best = 1;
  double best_ll = mind_log_likelihood(rho, k, 1.0);
  for (int d = 2; d <= ambient; ++d) {
    const double ll = mind_log_likelihood(rho, k, d);
    if (ll > best_ll) {
      best_ll = ll;
      best = d;
    }
  }
  out.mli.value = best;

  // Golden-section search for the continuous maximizer on [1, D].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 1.0, hi = std::max(1.0, static_cast<double>(ambient));
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double fa = mind_log_likelihood(rho, k, a), fb = mind_log_likelihood(rho, k, b);
  while (hi - lo > 1e-6) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = mind_log_likelihood(rho, k, b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = mind_log_likelihood(rho, k, a);
    }
  }
  out.mlk.value = 0.5 * (lo + hi);
  return out;
}

// ---------------------------------------------------------------------------
// Carter kNN-graph length
// ---------------------------------------------------------------------------

inline IdEstimate estimate_knn_carter(const IdContext& ctx, const EstimatorParams& params) {
  const Eigen::Index n = ctx.size();
  const int k = params.knn_k;
  std::vector<int> sizes = params.knn_subset_sizes;
  if (sizes.empty())
    sizes = {static_cast<int>(n / 8), static_cast<int>(n / 4), static_cast<int>(n / 2), static_cast<int>(n)};
  {
    auto sorted = sizes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw EstimatorError("knn: subset sizes must be distinct (degenerate regression)");
    if (sorted.size() < 2) throw EstimatorError("knn: need at least two subset sizes");
    if (sorted.front() <= k || sorted.back() > n)
      throw EstimatorError("knn: subset sizes must lie in (k, N]; N=" + std::to_string(n));
  }

  const auto& dist = ctx.distances();
  std::vector<double> log_n, log_len;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::vector<double> row;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const int m = sizes[s];
    // Partial Fisher-Yates: the first m entries form a uniform subset.
    for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    CounterRng rng(hash_combine(params.knn_seed, static_cast<std::uint64_t>(m)));
    for (int i = 0; i < m; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
      std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    double length = 0.0;
    for (int a = 0; a < m; ++a) {
      row.clear();
      for (int b = 0; b < m; ++b)
        if (b != a) row.push_back(dist(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]));
      std::partial_sort(row.begin(), row.begin() + k, row.end());
      for (int j = 0; j < k; ++j) length += row[static_cast<std::size_t>(j)];
    }
    if (!(length > 0.0)) throw EstimatorError("knn: zero graph length (duplicate points)");
    log_n.push_back(std::log(static_cast<double>(m)));
    log_len.push_back(std::log(length));
  }

  const double count = static_cast<double>(log_n.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    mx += log_n[i];
    my += log_len[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sxy += (log_n[i] - mx) * (log_len[i] - my);
    sxx += (log_n[i] - mx) * (log_n[i] - mx);
  }
  const double slope = sxy / sxx;
  IdEstimate est;
  est.method = IdMethod::knn;
  est.diagnostics["slope"] = slope;
  const double ambient = static_cast<double>(ctx.data().cols());
  if (slope >= 1.0) {
    est.status = IdStatus::unstable;
    est.value = ambient;
    est.note = "graph-length slope >= 1; clamped to ambient dimension";
    return est;
  }
  est.value = std::clamp(1.0 / (1.0 - slope), 1.0, ambient);
  return est;
}

// ---------------------------------------------------------------------------

inline IdEstimate estimate(IdMethod method, const IdContext& ctx, const EstimatorParams& params) {
  switch (method) {
    case IdMethod::fishers: return estimate_fishers(ctx.data(), params);
    case IdMethod::lpca: return estimate_lpca(ctx.data(), params);
    case IdMethod::corrint: return estimate_corrint(ctx, params);
    case IdMethod::mle: return estimate_mle(ctx, params);
    case IdMethod::mada: return estimate_mada(ctx, params);
    case IdMethod::mom: return estimate_mom(ctx, params);
    case IdMethod::twonn: return estimate_twonn(ctx, params);
    case IdMethod::mind_mli: return estimate_mind_ml(ctx, params).mli;
    case IdMethod::mind_mlk: return estimate_mind_ml(ctx, params).mlk;
    case IdMethod::knn: return estimate_knn_carter(ctx, params);
  }
  throw std::logic_error("unknown estimator");
}

inline IdEstimate estimate(IdMethod method, const Matrix& x, const EstimatorParams& params = {}) {
  return estimate(method, IdContext(x, params), params);
}

}  // namespace nasgeom
