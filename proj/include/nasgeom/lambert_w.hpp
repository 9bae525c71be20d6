#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nasgeom {

/// Principal branch W0 of the Lambert function, x >= -1/e.
///
/// Initial guess: branch-point series near -1/e, log1p for moderate x, the
/// asymptotic ln x - ln ln x expansion for large x. Refined by Halley steps.
inline double lambert_w0(double x) {
  constexpr double inv_e = 1.0 / std::numbers::e;
  if (std::isnan(x)) return x;
  if (x < -inv_e) {
    // Allow round-off in callers that compute -1/e themselves.
    if (x < -inv_e - 4.0 * std::numeric_limits<double>::epsilon()) throw std::domain_error("lambert_w0: x < -1/e");
    return -1.0;
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  double w;
  if (x < -0.32) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  } else if (x < 3.0) {
    w = std::log1p(x);
    if (x < 0.0) w = x * (1.0 - x);
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int iter = 0; iter < 64; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double fp = ew * wp1;
    const double step = f / (fp - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    if (!std::isfinite(next)) break;
    if (std::abs(next - w) <= 1e-16 * (1.0 + std::abs(next))) {
      w = next;
      break;
    }
    w = next;
  }
  return std::max(w, -1.0);
}

}  // namespace nasgeom
