#include "sirl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sirl/error.hpp"

namespace sirl {

namespace {

constexpr double kRowTolerance = 1e-9;

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError(std::string(what) + " produced a non-finite value");
  }
}

}  // namespace

Transitions::Transitions(std::size_t n_states, std::size_t n_actions,
                         std::vector<std::vector<Entry>> rows)
    : n_states_(n_states), n_actions_(n_actions) {
  if (n_states == 0 || n_actions == 0) throw ConfigError("MDP needs at least one state and action");
  if (rows.size() != n_states * n_actions) throw ShapeError("transition rows must number n_states * n_actions");
  offsets_.reserve(rows.size() + 1);
  offsets_.push_back(0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& row = rows[k];
    std::sort(row.begin(), row.end(), [](const Entry& x, const Entry& y) { return x.next < y.next; });
    double total = 0.0;
    const auto begin = entries_.size();
    for (const auto& e : row) {
      if (e.next >= n_states) throw ConfigError("transition successor out of range");
      if (!(e.prob >= 0.0) || !std::isfinite(e.prob)) throw ConfigError("transition probabilities must be finite and non-negative");
      total += e.prob;
      if (e.prob == 0.0) continue;
      if (entries_.size() > begin && entries_.back().next == e.next) {
        entries_.back().prob += e.prob;
      } else {
        entries_.push_back(e);
      }
    }
    if (std::abs(total - 1.0) > kRowTolerance) {
      throw ConfigError("transition row (s=" + std::to_string(k / n_actions) +
                        ", a=" + std::to_string(k % n_actions) + ") sums to " + std::to_string(total));
    }
    offsets_.push_back(entries_.size());
  }
}

Transitions Transitions::from_dense(std::size_t n_states, std::size_t n_actions,
                                    std::span<const double> tensor) {
  if (tensor.size() != n_states * n_actions * n_states) throw ShapeError("dense transition tensor has wrong size");
  std::vector<std::vector<Entry>> rows(n_states * n_actions);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t next = 0; next < n_states; ++next) {
      const double p = tensor[k * n_states + next];
      if (p != 0.0) rows[k].push_back({next, p});
    }
  }
  return Transitions(n_states, n_actions, std::move(rows));
}

double Transitions::probability(std::size_t s, std::size_t a, std::size_t next) const {
  for (const auto& e : row(s, a)) {
    if (e.next == next) return e.prob;
  }
  return 0.0;
}

TabularMdp::TabularMdp(std::shared_ptr<const Transitions> transitions,
                       std::vector<double> reward, double discount)
    : transitions_(std::move(transitions)), reward_(std::move(reward)), discount_(discount) {
  if (!transitions_) throw ConfigError("MDP requires a transition model");
  if (reward_.size() != transitions_->n_states()) throw ShapeError("reward length must equal the state count");
  if (!(discount_ >= 0.0 && discount_ < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  check_finite(reward_, "reward");
}

double TabularMdp::q_value(std::size_t s, std::size_t a, std::span<const double> values) const {
  double expected = 0.0;
  for (const auto& e : transitions_->row(s, a)) expected += e.prob * values[e.next];
  return reward_[s] + discount_ * expected;
}

Policy Policy::deterministic(std::vector<std::size_t> actions, std::size_t n_actions) {
  if (actions.empty()) throw ConfigError("policy needs at least one state");
  Policy p;
  p.n_states_ = actions.size();
  p.n_actions_ = n_actions;
  p.probs_.assign(p.n_states_ * n_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= n_actions) throw ConfigError("deterministic action index out of range");
    p.probs_[s * n_actions + actions[s]] = 1.0;
  }
  p.actions_ = std::move(actions);
  return p;
}

Policy Policy::stochastic(std::vector<double> probs, std::size_t n_states, std::size_t n_actions) {
  if (n_states == 0 || n_actions == 0) throw ConfigError("policy needs at least one state and action");
  if (probs.size() != n_states * n_actions) throw ShapeError("policy table has wrong size");
  for (std::size_t s = 0; s < n_states; ++s) {
    double total = 0.0;
    for (std::size_t a = 0; a < n_actions; ++a) {
      const double p = probs[s * n_actions + a];
      if (!(p >= 0.0)) throw ConfigError("policy probabilities must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > kRowTolerance) throw ConfigError("policy row does not sum to 1");
  }
  Policy p;
  p.n_states_ = n_states;
  p.n_actions_ = n_actions;
  p.probs_ = std::move(probs);
  return p;
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
  return stochastic(std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)),
                    n_states, n_actions);
}

std::size_t Policy::action(std::size_t s) const {
  if (!is_deterministic()) throw ConfigError("stochastic policy has no single action");
  return actions_[s];
}

const std::vector<std::size_t>& Policy::actions() const {
  if (!is_deterministic()) throw ConfigError("stochastic policy has no single action");
  return actions_;
}

Policy greedy_policy(const TabularMdp& mdp, std::span<const double> values) {
  std::vector<std::size_t> actions(mdp.n_states(), 0);
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    double best = mdp.q_value(s, 0, values);
    for (std::size_t a = 1; a < mdp.n_actions(); ++a) {
      const double q = mdp.q_value(s, a, values);
      if (q > best) {
        best = q;
        actions[s] = a;
      }
    }
  }
  return Policy::deterministic(std::move(actions), mdp.n_actions());
}

double bellman_residual(const TabularMdp& mdp, std::span<const double> values) {
  double residual = 0.0;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) best = std::max(best, mdp.q_value(s, a, values));
    residual = std::max(residual, std::abs(best - values[s]));
  }
  return residual;
}

Solution value_iteration(const TabularMdp& mdp, const DpOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
  const auto n = mdp.n_states();
  ValueFunction values(n, 0.0), next(n, 0.0);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) {
      double best = mdp.q_value(s, 0, values);
      for (std::size_t a = 1; a < mdp.n_actions(); ++a) best = std::max(best, mdp.q_value(s, a, values));
      next[s] = best;
    }
    const double change = max_abs_diff(next, values);
    values.swap(next);
    check_finite(values, "value iteration");
    // residual(values) <= discount * change <= tol
    if (change <= options.tol) {
      auto policy = greedy_policy(mdp, values);
      return {std::move(values), std::move(policy), it};
    }
  }
  throw DivergenceError("value iteration did not converge within " +
                        std::to_string(options.max_iterations) + " sweeps");
}

SoftSolution soft_value_iteration(const TabularMdp& mdp, const DpOptions& options,
                                  std::span<const double> warm_start) {
  if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
  const auto n = mdp.n_states();
  const auto m = mdp.n_actions();
  ValueFunction values(n, 0.0), next(n, 0.0);
  if (!warm_start.empty()) {
    if (warm_start.size() != n) throw ShapeError("warm start length must equal the state count");
    values.assign(warm_start.begin(), warm_start.end());
  }
  std::vector<double> q(n * m, 0.0);

  auto backup = [&](std::span<const double> v, std::span<double> out) {
    for (std::size_t s = 0; s < n; ++s) {
      double* qs = q.data() + s * m;
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < m; ++a) {
        qs[a] = mdp.q_value(s, a, v);
        top = std::max(top, qs[a]);
      }
      double sum = 0.0;
      for (std::size_t a = 0; a < m; ++a) sum += std::exp(qs[a] - top);
      out[s] = top + std::log(sum);
    }
  };

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    backup(values, next);
    const double change = max_abs_diff(next, values);
    values.swap(next);
    check_finite(values, "soft value iteration");
    if (change <= options.tol) {
      // Q consistent with the returned values keeps the policy rows exact.
      backup(values, next);
      std::vector<double> probs(n * m);
      for (std::size_t s = 0; s < n; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
          probs[s * m + a] = std::exp(q[s * m + a] - next[s]);
          total += probs[s * m + a];
        }
        for (std::size_t a = 0; a < m; ++a) probs[s * m + a] /= total;
      }
      return {std::move(next), std::move(q), Policy::stochastic(std::move(probs), n, m), it};
    }
  }
  throw DivergenceError("soft value iteration did not converge within " +
                        std::to_string(options.max_iterations) + " sweeps");
}

ValueFunction policy_evaluation(const TabularMdp& mdp, const Policy& policy,
                                const DpOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw ShapeError("policy shape does not match the MDP");
  }
  const auto n = mdp.n_states();
  ValueFunction values(n, 0.0), next(n, 0.0);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) {
      double v = 0.0;
      const auto row = policy.row(s);
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        if (row[a] != 0.0) v += row[a] * mdp.q_value(s, a, values);
      }
      next[s] = v;
    }
    const double change = max_abs_diff(next, values);
    values.swap(next);
    check_finite(values, "policy evaluation");
    if (change <= options.tol) return values;
  }
  throw DivergenceError("policy evaluation did not converge within " +
                        std::to_string(options.max_iterations) + " sweeps");
}

double evd(const TabularMdp& true_mdp, const Policy& policy, std::span<const double> start_dist,
           const DpOptions& options) {
  if (start_dist.size() != true_mdp.n_states()) throw ShapeError("start distribution length must equal the state count");
  const double mass = std::accumulate(start_dist.begin(), start_dist.end(), 0.0);
  if (std::abs(mass - 1.0) > kRowTolerance) throw ConfigError("start distribution must sum to 1");
  const auto optimal = value_iteration(true_mdp, options);
  const auto candidate = policy_evaluation(true_mdp, policy, options);
  double diff = 0.0;
  for (std::size_t s = 0; s < start_dist.size(); ++s) diff += start_dist[s] * (optimal.values[s] - candidate[s]);
  return diff;
}

double evd(const TabularMdp& true_mdp, const Policy& policy, const DpOptions& options) {
  const auto n = true_mdp.n_states();
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  return evd(true_mdp, policy, uniform, options);
}

}  // namespace sirl
