#pragma once

// Quasi-orthogonality statistics of a centred feature cloud, in degrees.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "feature_matrix.hpp"

namespace nasgeom {

struct OrthoMeasures {
  double f_mean = 0.0;
  double f_std = 0.0;
  double cmean = 0.0;
  double cstd = 0.0;
};

struct AngleStats {
  double mean = 0.0;
  double std = 0.0;  // population
};

class DegenerateAngle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline double angle_degrees(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                            double norm_a, double norm_b) {
  const double cosine = std::clamp(a.dot(b) / (norm_a * norm_b), -1.0, 1.0);
  return std::acos(cosine) * (180.0 / std::numbers::pi);
}

inline AngleStats population_stats(const std::vector<double>& values) {
  AngleStats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

inline std::string join_ids(const std::vector<Eigen::Index>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 16; ++i) out += (i ? "," : "") + std::to_string(ids[i]);
  if (ids.size() > 16) out += ",...";
  return out;
}

}  // namespace detail

/// Mean and population std of the angles over all unordered row pairs.
/// Expects centred rows; zero-norm rows are an error.
inline AngleStats pairwise_angle_stats(const Matrix& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw std::invalid_argument("pairwise_angle_stats: need at least 2 rows");
  const Vector norms = x.rowwise().norm();
  std::vector<Eigen::Index> zero;
  for (Eigen::Index i = 0; i < n; ++i)
    if (norms[i] == 0.0) zero.push_back(i);
  if (!zero.empty()) throw DegenerateAngle("zero-norm rows: " + detail::join_ids(zero));
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) angles.push_back(detail::angle_degrees(x.row(i), x.row(j), norms[i], norms[j]));
  return detail::population_stats(angles);
}

/// Angle between each row and the centroid of its class; a row contributes to its own centroid.
inline AngleStats centroid_angle_stats(const Matrix& x, const std::vector<int>& labels) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("centroid_angle_stats: one label per row required");
  if (n < 1) throw std::invalid_argument("centroid_angle_stats: empty input");
  std::map<int, std::pair<Eigen::RowVectorXd, int>> sums;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = sums.try_emplace(labels[static_cast<std::size_t>(i)], Eigen::RowVectorXd::Zero(x.cols()), 0);
    it->second.first += x.row(i);
    ++it->second.second;
  }
  std::map<int, Eigen::RowVectorXd> centroids;
  std::vector<std::string> bad_classes;
  for (auto& [label, acc] : sums) {
    centroids[label] = acc.first / static_cast<double>(acc.second);
    if (centroids[label].norm() == 0.0) bad_classes.push_back(std::to_string(label));
  }
  if (!bad_classes.empty()) {
    std::string msg = "zero-norm class centroid for classes:";
    for (const auto& c : bad_classes) msg += " " + c;
    throw DegenerateAngle(msg);
  }
  const Vector norms = x.rowwise().norm();
  std::vector<Eigen::Index> zero;
  for (Eigen::Index i = 0; i < n; ++i)
    if (norms[i] == 0.0) zero.push_back(i);
  if (!zero.empty()) throw DegenerateAngle("zero-norm rows: " + detail::join_ids(zero));
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = centroids.at(labels[static_cast<std::size_t>(i)]);
    angles.push_back(detail::angle_degrees(x.row(i), c, norms[i], c.norm()));
  }
  return detail::population_stats(angles);
}

/// All four measures; the input must already be centred.
inline OrthoMeasures ortho_measures(const FeatureMatrix& x) {
  OrthoMeasures m;
  const auto pair = pairwise_angle_stats(x.values);
  m.f_mean = pair.mean;
  m.f_std = pair.std;
  if (x.has_labels()) {
    const auto cen = centroid_angle_stats(x.values, x.labels);
    m.cmean = cen.mean;
    m.cstd = cen.std;
  }
  return m;
}

}  // namespace nasgeom
