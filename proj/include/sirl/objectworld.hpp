#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sirl/demos.hpp"
#include "sirl/features.hpp"
#include "sirl/mdp.hpp"

namespace sirl::objectworld {

/// Actions in index order.
enum class Action : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };
inline constexpr std::size_t kNumActions = 5;

struct Object {
  std::size_t cell;
  std::size_t inner_color;
  std::size_t outer_color;

  friend bool operator==(const Object&, const Object&) = default;
};

/// N x N grid with coloured objects. Cell index is row * N + col.
struct Instance {
  std::size_t grid_size = 0;
  std::size_t n_colors = 0;
  std::vector<Object> objects;
  double wind = 0.3;
  double discount = 0.9;
  std::uint64_t seed = 0;

  std::size_t n_states() const { return grid_size * grid_size; }
  std::size_t row(std::size_t cell) const { return cell / grid_size; }
  std::size_t col(std::size_t cell) const { return cell % grid_size; }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Colours 0 and 1 drive the reward; the rest are distractors.
inline constexpr std::size_t kRed = 0;
inline constexpr std::size_t kBlue = 1;

enum class FeatureVariant { kContinuous, kDiscrete };

/// Objects are placed uniformly without replacement, colours uniformly.
Instance generate(std::size_t grid_size, std::size_t n_objects, std::size_t n_colors, double wind,
                  double discount, std::uint64_t seed);

/// Throws ConfigError on out-of-range cells/colours or duplicate cells.
void validate(const Instance& instance);

/// Cell reached by applying `action` deterministically; off-grid moves stay.
std::size_t move(const Instance& instance, std::size_t cell, std::size_t action);

/// T[s][a] = (1 - wind) * onehot(move(s, a)) + wind / 5 * sum_a' onehot(move(s, a')).
std::shared_ptr<const Transitions> transition_model(const Instance& instance);

/// +1 within 3 steps (L1) of an outer-red and 2 of an outer-blue object,
/// -1 within 3 of an outer-red only, 0 otherwise.
std::vector<double> true_reward(const Instance& instance);

/// MDP with the ground-truth reward.
TabularMdp true_mdp(const Instance& instance);

/// 2C columns ordered (inner c0, outer c0, inner c1, outer c1, ...): Euclidean
/// distance to the nearest such object, or N * sqrt(2) when none exists.
FeatureMatrix features_continuous(const Instance& instance);

/// 2C * N binary columns; in each N-block bit d (d = 1..N) is set iff the
/// continuous distance is < d.
FeatureMatrix features_discrete(const Instance& instance);

FeatureMatrix features(const Instance& instance, FeatureVariant variant);

/// Trajectories from uniformly random start cells following the optimal
/// deterministic policy for the true reward under the stochastic dynamics.
DemoSet generate_demos(const Instance& instance, std::size_t n_demos, std::size_t length,
                       std::uint64_t seed);

/// Same, for an explicit policy.
DemoSet rollout_demos(const TabularMdp& mdp, const Policy& policy, std::size_t n_demos,
                      std::size_t length, std::uint64_t seed);

/// Header "objectworld grid_size=.. n_colors=.. wind=.. discount=.. seed=.. n_objects=..",
/// then one "cell inner outer" line per object.
void write_instance(std::ostream& out, const Instance& instance);
Instance read_instance(std::istream& in);

std::string to_string(FeatureVariant variant);
FeatureVariant parse_feature_variant(const std::string& name);

}  // namespace sirl::objectworld
