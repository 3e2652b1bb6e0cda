#pragma once

#include <cstddef>
#include <vector>

namespace sirl {

struct Step {
  std::size_t state;
  std::size_t action;

  friend bool operator==(const Step&, const Step&) = default;
};

using Trajectory = std::vector<Step>;

/// Expert demonstrations; every trajectory has the same length.
struct DemoSet {
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  std::size_t trajectory_length() const {
    return trajectories.empty() ? 0 : trajectories.front().size();
  }

  friend bool operator==(const DemoSet&, const DemoSet&) = default;
};

/// Throws ConfigError when lengths differ or indices exceed the MDP shape.
void validate(const DemoSet& demos, std::size_t n_states, std::size_t n_actions);

}  // namespace sirl
