#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sirl {

/// Dense state-by-feature matrix, row-major.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  FeatureMatrix(std::size_t rows, std::size_t cols) : FeatureMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Reward weights over the feature columns.
using WeightVector = std::vector<double>;

/// r = features * w. Throws ShapeError on dimension mismatch.
std::vector<double> reward_from_weights(std::span<const double> w, const FeatureMatrix& features);

/// features^T * v over states.
std::vector<double> feature_expectation(const FeatureMatrix& features, std::span<const double> state_weights);

}  // namespace sirl
