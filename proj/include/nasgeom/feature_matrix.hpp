#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nasgeom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Samples x feature-width matrix with optional per-row class labels.
struct FeatureMatrix {
  Matrix values;
  std::vector<int> labels;  // empty when unlabeled, else one per row

  FeatureMatrix() = default;
  explicit FeatureMatrix(Matrix v, std::vector<int> l = {}) : values(std::move(v)), labels(std::move(l)) {}

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
  bool has_labels() const noexcept { return !labels.empty(); }

  /// Throws std::invalid_argument when a label vector is misaligned or an entry is non-finite.
  void validate() const {
    if (has_labels() && static_cast<Eigen::Index>(labels.size()) != rows())
      throw std::invalid_argument("label count " + std::to_string(labels.size()) + " != rows " +
                                  std::to_string(rows()));
    if (!values.allFinite()) throw std::invalid_argument("feature matrix has non-finite entries");
  }
};

/// Stack row blocks vertically; labels are kept only when every block has them.
inline FeatureMatrix vstack(const std::vector<FeatureMatrix>& blocks) {
  if (blocks.empty()) return {};
  Eigen::Index rows = 0;
  const Eigen::Index cols = blocks.front().cols();
  bool labeled = true;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw std::invalid_argument("vstack: column mismatch");
    rows += b.rows();
    labeled = labeled && b.has_labels();
  }
  FeatureMatrix out{Matrix(rows, cols)};
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.values.middleRows(at, b.rows()) = b.values;
    at += b.rows();
    if (labeled) out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  }
  return out;
}

}  // namespace nasgeom
