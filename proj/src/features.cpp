#include "sirl/features.hpp"

#include <string>

#include "sirl/demos.hpp"
#include "sirl/error.hpp"

namespace sirl {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) throw ShapeError("feature matrix storage does not match its shape");
}

std::vector<double> reward_from_weights(std::span<const double> w, const FeatureMatrix& features) {
  if (w.size() != features.cols()) {
    throw ShapeError("weight dimension " + std::to_string(w.size()) + " does not match " +
                     std::to_string(features.cols()) + " feature columns");
  }
  std::vector<double> reward(features.rows(), 0.0);
  for (std::size_t s = 0; s < features.rows(); ++s) {
    const auto row = features.row(s);
    double r = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) r += row[j] * w[j];
    reward[s] = r;
  }
  return reward;
}

std::vector<double> feature_expectation(const FeatureMatrix& features, std::span<const double> state_weights) {
  if (state_weights.size() != features.rows()) throw ShapeError("state weight length must equal the feature row count");
  std::vector<double> out(features.cols(), 0.0);
  for (std::size_t s = 0; s < features.rows(); ++s) {
    const double c = state_weights[s];
    if (c == 0.0) continue;
    const auto row = features.row(s);
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += c * row[j];
  }
  return out;
}

void validate(const DemoSet& demos, std::size_t n_states, std::size_t n_actions) {
  const auto length = demos.trajectory_length();
  for (const auto& traj : demos.trajectories) {
    if (traj.size() != length || length == 0) throw ConfigError("all demonstrations must share one non-zero length");
    for (const auto& step : traj) {
      if (step.state >= n_states || step.action >= n_actions) throw ConfigError("demonstration step out of range");
    }
  }
}

}  // namespace sirl
