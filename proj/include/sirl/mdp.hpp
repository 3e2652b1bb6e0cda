#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sirl {

/// Sparse transition tensor T[s][a][s'] stored row-compressed per (s, a).
class Transitions {
 public:
  struct Entry {
    std::size_t next;
    double prob;
  };

  /// rows has n_states * n_actions entries, indexed s * n_actions + a.
  /// Duplicate successors are merged and zero entries dropped. Throws
  /// ConfigError unless every row is a probability distribution (1e-9).
  Transitions(std::size_t n_states, std::size_t n_actions,
              std::vector<std::vector<Entry>> rows);

  /// Dense tensor in (s, a, s') row-major order.
  static Transitions from_dense(std::size_t n_states, std::size_t n_actions,
                                std::span<const double> tensor);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  std::span<const Entry> row(std::size_t s, std::size_t a) const {
    const auto k = s * n_actions_ + a;
    return {entries_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }

  double probability(std::size_t s, std::size_t a, std::size_t next) const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Finite MDP with a state-only reward. Transitions are shared between
/// copies so that swapping rewards is cheap.
class TabularMdp {
 public:
  TabularMdp(std::shared_ptr<const Transitions> transitions, std::vector<double> reward,
             double discount);

  TabularMdp with_reward(std::vector<double> reward) const {
    return TabularMdp(transitions_, std::move(reward), discount_);
  }

  std::size_t n_states() const { return transitions_->n_states(); }
  std::size_t n_actions() const { return transitions_->n_actions(); }
  const Transitions& transitions() const { return *transitions_; }
  const std::shared_ptr<const Transitions>& shared_transitions() const { return transitions_; }
  std::span<const double> reward() const { return reward_; }
  double discount() const { return discount_; }

  /// r(s) + discount * sum_{s'} T[s][a][s'] * values[s'].
  double q_value(std::size_t s, std::size_t a, std::span<const double> values) const;

 private:
  std::shared_ptr<const Transitions> transitions_;
  std::vector<double> reward_;
  double discount_;
};

/// Deterministic or stochastic policy; both expose action probabilities.
class Policy {
 public:
  static Policy deterministic(std::vector<std::size_t> actions, std::size_t n_actions);
  /// probs is n_states x n_actions row-major; rows must sum to 1 within 1e-9.
  static Policy stochastic(std::vector<double> probs, std::size_t n_states,
                           std::size_t n_actions);
  static Policy uniform(std::size_t n_states, std::size_t n_actions);

  bool is_deterministic() const { return !actions_.empty(); }
  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::span<const double> row(std::size_t s) const {
    return {probs_.data() + s * n_actions_, n_actions_};
  }
  double prob(std::size_t s, std::size_t a) const { return probs_[s * n_actions_ + a]; }
  /// Only valid for deterministic policies.
  std::size_t action(std::size_t s) const;
  const std::vector<std::size_t>& actions() const;

 private:
  Policy() = default;
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> probs_;
  std::vector<std::size_t> actions_;
};

using ValueFunction = std::vector<double>;

struct DpOptions {
  double tol = 1e-8;
  std::size_t max_iterations = 10000;
};

inline constexpr double kSoftTolerance = 1e-4;

struct Solution {
  ValueFunction values;
  Policy policy;
  std::size_t iterations = 0;
};

struct SoftSolution {
  ValueFunction values;
  std::vector<double> q;  // n_states x n_actions
  Policy policy;
  std::size_t iterations = 0;

  double log_prob(std::size_t s, std::size_t a) const {
    return q[s * policy.n_actions() + a] - values[s];
  }
};

/// Hard Bellman backups to tolerance; greedy policy with ties to the lowest
/// action index. Throws DivergenceError past the sweep cap.
Solution value_iteration(const TabularMdp& mdp, const DpOptions& options = {});

/// Logsumexp backups producing the maximum-entropy stochastic policy.
/// A non-empty warm_start seeds the iteration.
SoftSolution soft_value_iteration(const TabularMdp& mdp,
                                  const DpOptions& options = {kSoftTolerance, 10000},
                                  std::span<const double> warm_start = {});

ValueFunction policy_evaluation(const TabularMdp& mdp, const Policy& policy,
                                const DpOptions& options = {});

/// Expected value difference of `policy` against the optimal policy, both
/// valued under the reward carried by true_mdp.
double evd(const TabularMdp& true_mdp, const Policy& policy,
           std::span<const double> start_dist, const DpOptions& options = {});

/// As above with a uniform start distribution.
double evd(const TabularMdp& true_mdp, const Policy& policy, const DpOptions& options = {});

/// max_s |max_a Q(s, a) - V(s)|
double bellman_residual(const TabularMdp& mdp, std::span<const double> values);

/// The greedy policy for given values, ties broken to the lowest index.
Policy greedy_policy(const TabularMdp& mdp, std::span<const double> values);

}  // namespace sirl
