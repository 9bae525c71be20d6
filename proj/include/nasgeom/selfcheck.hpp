#pragma once

// Bundled oracle checks run by `nasgeom selfcheck`.

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "idest.hpp"
#include "lambert_w.hpp"
#include "ortho.hpp"
#include "synth.hpp"

namespace nasgeom {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline CheckResult fishers_single_round_trip() {
  const double p = fisher_inseparability_closed_form(0.8, 10.0);
  const double n = fisher_dimension(0.8, p);
  std::ostringstream os;
  os.precision(12);
  os << "n=10, alpha=0.8 -> " << n;
  return {"fishers round-trip n=10", std::abs(n - 10.0) < 1e-9, os.str()};
}

inline CheckResult fishers_grid_round_trip() {
  double worst = 0.0;
  for (double a : default_alpha_grid())
    for (int n = 1; n <= 30; ++n) worst = std::max(worst, std::abs(fisher_dimension(a, fisher_inseparability_closed_form(a, n)) - n));
  std::ostringstream os;
  os << "max |error| = " << worst;
  return {"fishers round-trip grid x n=1..30", worst < 1e-9, os.str()};
}

inline CheckResult lambert_residuals() {
  const double lo = -1.0 / std::numbers::e + 1e-9;
  double worst = 0.0;
  // 500 points on the negative side, 500 log-spaced positive points.
  for (int i = 0; i < 1000; ++i) {
    double x;
    if (i < 500)
      x = -std::exp(std::log(-lo) + (std::log(1e-12) - std::log(-lo)) * i / 499.0);
    else
      x = std::exp(std::log(1e-12) + (std::log(1e6) - std::log(1e-12)) * (i - 500) / 499.0);
    const double w = lambert_w0(x);
    worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
  }
  std::ostringstream os;
  os << "max scaled residual = " << worst;
  return {"lambert W0 residual", worst < 1e-12, os.str()};
}

inline CheckResult cube_envelopes(std::uint64_t seed) {
  EstimatorParams params;
  std::ostringstream os;
  bool ok = true;
  for (int d : {2, 4, 8}) {
    const auto sample = embed(sample_cube(d, 2000, seed + d), 64, seed + 100 + d);
    IdContext ctx(sample.data, params);
    os << "d=" << d << ":";
    for (IdMethod m : kAllIdMethods) {
      if (m == IdMethod::knn) continue;
      double v = std::nan("");
      try {
        v = estimate(m, ctx, params).value;
      } catch (const std::exception&) {
      }
      const bool in = v >= 0.6 * d && v <= 1.5 * d;
      ok = ok && in;
      os << " " << to_string(m) << "=" << v << (in ? "" : "!");
    }
    os << "; ";
  }
  return {"estimator envelopes on cubes", ok, os.str()};
}

inline CheckResult ortho_concentration(std::uint64_t seed) {
  const auto g = sample_gaussian(64, 128, seed);
  const auto s = pairwise_angle_stats(center(g.data));
  std::ostringstream os;
  os << "f_mean=" << s.mean << " f_std=" << s.std;
  return {"quasi-orthogonality 128x64", s.mean >= 88.0 && s.mean <= 92.0, os.str()};
}

inline CheckResult knn_oracle(std::uint64_t seed) {
  int mismatches = 0;
  for (int t = 0; t < 20; ++t) {
    const auto x = sample_gaussian(4, 60, seed + t).data;
    const auto table = knn(x, 5);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      std::vector<bool> taken(static_cast<std::size_t>(x.rows()), false);
      taken[static_cast<std::size_t>(i)] = true;
      for (int j = 0; j < 5; ++j) {
        Eigen::Index best = -1;
        double best_d = 0.0;
        for (Eigen::Index c = 0; c < x.rows(); ++c) {
          if (taken[static_cast<std::size_t>(c)]) continue;
          const double d = euclidean(x, i, c);
          if (best < 0 || d < best_d) {
            best = c;
            best_d = d;
          }
        }
        taken[static_cast<std::size_t>(best)] = true;
        if (table.index(i, j) != best || table.distance(i, j) != best_d) ++mismatches;
      }
    }
  }
  return {"knn vs quadratic scan", mismatches == 0, std::to_string(mismatches) + " mismatches"};
}

}  // namespace detail

inline std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 20240101) {
  return {detail::fishers_single_round_trip(), detail::fishers_grid_round_trip(), detail::lambert_residuals(),
          detail::cube_envelopes(seed),        detail::ortho_concentration(seed), detail::knn_oracle(seed)};
}

}  // namespace nasgeom
