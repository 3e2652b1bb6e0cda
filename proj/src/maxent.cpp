#include "sirl/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sirl/error.hpp"
#include "sirl/random.hpp"

namespace sirl {

DemoStats summarize(const DemoSet& demos, std::span<const std::size_t> subset,
                    std::size_t n_states, std::size_t n_actions) {
  validate(demos, n_states, n_actions);
  DemoStats stats;
  stats.n_states = n_states;
  stats.n_actions = n_actions;
  stats.horizon = demos.trajectory_length();
  stats.pair_counts.assign(n_states * n_actions, 0.0);
  stats.start_counts.assign(n_states, 0.0);
  for (auto idx : subset) {
    if (idx >= demos.size()) throw ConfigError("demonstration index out of range");
    const auto& traj = demos.trajectories[idx];
    stats.start_counts[traj.front().state] += 1.0;
    for (const auto& step : traj) stats.pair_counts[step.state * n_actions + step.action] += 1.0;
    ++stats.n_trajectories;
  }
  if (stats.n_trajectories == 0) throw ConfigError("demonstration subset is empty");
  return stats;
}

DemoStats summarize(const DemoSet& demos, std::size_t n_states, std::size_t n_actions) {
  std::vector<std::size_t> all(demos.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return summarize(demos, all, n_states, n_actions);
}

std::vector<double> expected_svf(const TabularMdp& mdp, const Policy& policy,
                                 std::span<const double> start_counts, std::size_t horizon) {
  const auto n = mdp.n_states();
  if (start_counts.size() != n) throw ShapeError("start counts length must equal the state count");
  if (policy.n_states() != n || policy.n_actions() != mdp.n_actions()) throw ShapeError("policy shape does not match the MDP");
  const double total = std::accumulate(start_counts.begin(), start_counts.end(), 0.0);
  if (!(total > 0.0)) throw ConfigError("start counts must have positive mass");

  std::vector<double> current(n), next(n), svf(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) current[s] = start_counts[s] / total;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t s = 0; s < n; ++s) svf[s] += current[s];
    if (t + 1 == horizon) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (current[s] == 0.0) continue;
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        const double mass = current[s] * policy.prob(s, a);
        if (mass == 0.0) continue;
        for (const auto& e : mdp.transitions().row(s, a)) next[e.next] += mass * e.prob;
      }
    }
    current.swap(next);
  }
  return svf;
}

std::vector<double> gradient_visitation(const DemoStats& stats, const TabularMdp& mdp,
                                        const Policy& soft_policy, const DpOptions& options,
                                        std::span<const double> warm_start) {
  const auto n = mdp.n_states();
  const auto m = mdp.n_actions();
  const double gamma = mdp.discount();
  const double scale = 1.0 / static_cast<double>(stats.n_trajectories);

  std::vector<double> source(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const double c = stats.pair_counts[s * m + a];
      if (c == 0.0) continue;
      source[s] += scale * c;
      for (const auto& e : mdp.transitions().row(s, a)) source[e.next] -= scale * c * gamma * e.prob;
    }
  }

  std::vector<double> svf = source, next(n);
  if (!warm_start.empty()) {
    if (warm_start.size() != n) throw ShapeError("visitation warm start length must equal the state count");
    svf.assign(warm_start.begin(), warm_start.end());
  }
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    next = source;
    for (std::size_t s = 0; s < n; ++s) {
      if (svf[s] == 0.0) continue;
      const auto row = soft_policy.row(s);
      for (std::size_t a = 0; a < m; ++a) {
        const double mass = gamma * svf[s] * row[a];
        for (const auto& e : mdp.transitions().row(s, a)) next[e.next] += mass * e.prob;
      }
    }
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) change = std::max(change, std::abs(next[s] - svf[s]));
    svf.swap(next);
    if (change <= options.tol) return svf;
  }
  throw DivergenceError("visitation solve did not converge within " +
                        std::to_string(options.max_iterations) + " sweeps");
}

LikelihoodEval evaluate_likelihood(const DemoStats& stats, std::span<const double> w,
                                   const FeatureMatrix& features, const TabularMdp& mdp,
                                   const LikelihoodOptions& options, WarmStart warm, bool with_gradient) {
  if (features.rows() != mdp.n_states()) throw ShapeError("feature rows must equal the state count");
  if (stats.n_states != mdp.n_states() || stats.n_actions != mdp.n_actions()) {
    throw ShapeError("demonstration statistics do not match the MDP");
  }
  const auto task = mdp.with_reward(reward_from_weights(w, features));
  LikelihoodEval out{0.0, {}, soft_value_iteration(task, options.soft, warm.values), {}};

  const auto n = mdp.n_states();
  const auto m = mdp.n_actions();
  const double scale = 1.0 / static_cast<double>(stats.n_trajectories);
  std::vector<double> empirical(n, 0.0);
  double ll = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < m; ++a) {
      const double c = stats.pair_counts[s * m + a];
      if (c == 0.0) continue;
      ll += c * out.soft.log_prob(s, a);
      empirical[s] += scale * c;
    }
  }
  out.log_likelihood = scale * ll;
  if (!with_gradient) return out;

  out.visitation = gradient_visitation(stats, task, out.soft.policy, options.soft, warm.visitation);
  for (std::size_t s = 0; s < n; ++s) empirical[s] -= out.visitation[s];
  out.gradient = feature_expectation(features, empirical);
  return out;
}

double log_likelihood(const DemoSet& demos, std::span<const double> w, const FeatureMatrix& features,
                      const TabularMdp& mdp, const LikelihoodOptions& options) {
  return evaluate_likelihood(summarize(demos, mdp.n_states(), mdp.n_actions()), w, features, mdp, options)
      .log_likelihood;
}

std::vector<double> gradient(const DemoSet& demos, std::span<const double> w,
                             const FeatureMatrix& features, const TabularMdp& mdp,
                             const LikelihoodOptions& options) {
  return evaluate_likelihood(summarize(demos, mdp.n_states(), mdp.n_actions()), w, features, mdp, options)
      .gradient;
}

AscentTrace ascend(std::span<const double> w0, const DemoStats& stats, const FeatureMatrix& features,
                   const TabularMdp& mdp, std::size_t m, double lr, const LikelihoodOptions& options) {
  if (m == 0) throw ConfigError("ascent needs at least one step");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be finite and non-negative");
  AscentTrace trace;
  trace.initial.assign(w0.begin(), w0.end());
  WeightVector w = trace.initial;
  std::vector<double> warm_values, warm_visitation;
  for (std::size_t step = 1; step <= m; ++step) {
    auto eval = evaluate_likelihood(stats, w, features, mdp, options, {warm_values, warm_visitation});
    trace.log_likelihoods.push_back(eval.log_likelihood);
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] += lr * eval.gradient[j];
      if (!std::isfinite(w[j])) {
        throw NumericalError("gradient ascent produced a non-finite weight at step " + std::to_string(step));
      }
    }
    warm_values = std::move(eval.soft.values);
    warm_visitation = std::move(eval.visitation);
  }
  trace.final_log_likelihood =
      evaluate_likelihood(stats, w, features, mdp, options, {warm_values, {}}, false).log_likelihood;
  trace.final = std::move(w);
  return trace;
}

WeightVector maxent_baseline(const DemoSet& demos, const FeatureMatrix& features, const TabularMdp& mdp,
                             std::size_t epochs, double lr, std::uint64_t seed,
                             const LikelihoodOptions& options) {
  Rng rng(seed);
  std::uniform_real_distribution<double> init(-1.0, 1.0);
  WeightVector w0(features.cols());
  for (auto& x : w0) x = init(rng);
  const auto stats = summarize(demos, mdp.n_states(), mdp.n_actions());
  return ascend(w0, stats, features, mdp, epochs, lr, options).final;
}

Policy policy_for_weights(std::span<const double> w, const FeatureMatrix& features,
                          const TabularMdp& mdp, const DpOptions& options) {
  return value_iteration(mdp.with_reward(reward_from_weights(w, features)), options).policy;
}

double evd_for_weights(std::span<const double> w, const FeatureMatrix& features,
                       const TabularMdp& true_mdp, const DpOptions& options) {
  return evd(true_mdp, policy_for_weights(w, features, true_mdp, options), options);
}

}  // namespace sirl
