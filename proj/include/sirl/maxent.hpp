#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sirl/demos.hpp"
#include "sirl/features.hpp"
#include "sirl/mdp.hpp"

namespace sirl {

/// Sufficient statistics of a demonstration subset: (state, action) counts
/// plus the number of trajectories they came from.
struct DemoStats {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::size_t n_trajectories = 0;
  std::size_t horizon = 0;
  std::vector<double> pair_counts;   // n_states x n_actions
  std::vector<double> start_counts;  // first-step states
};

DemoStats summarize(const DemoSet& demos, std::size_t n_states, std::size_t n_actions);
DemoStats summarize(const DemoSet& demos, std::span<const std::size_t> subset,
                    std::size_t n_states, std::size_t n_actions);

/// D = sum_{t < horizon} D_t with D_0 the normalised start counts and
/// D_{t+1}[s'] = sum_{s,a} D_t[s] pi(a|s) T[s][a][s'].
std::vector<double> expected_svf(const TabularMdp& mdp, const Policy& policy,
                                 std::span<const double> start_counts, std::size_t horizon);

struct LikelihoodOptions {
  DpOptions soft{kSoftTolerance, 10000};
};

/// Seeds for the soft values and the visitation solve; the visitation is
/// returned in LikelihoodEval so that ascent can chain them.
struct WarmStart {
  std::span<const double> values;
  std::span<const double> visitation;
};

struct LikelihoodEval {
  double log_likelihood = 0.0;
  std::vector<double> gradient;
  SoftSolution soft;
  std::vector<double> visitation;
};

/// Mean over trajectories of sum_t log pi_soft(a_t | s_t) for the reward
/// features * w, and its exact gradient
///   grad = phi_emp - features^T * svf,
/// where svf solves svf = src + discount * P_pi^T svf with source mass
/// e_s - discount * T[s][a] per demonstrated pair (averaged per trajectory).
LikelihoodEval evaluate_likelihood(const DemoStats& stats, std::span<const double> w,
                                   const FeatureMatrix& features, const TabularMdp& mdp,
                                   const LikelihoodOptions& options = {}, WarmStart warm = {},
                                   bool with_gradient = true);

/// Discounted visitation driving the gradient, for a given soft policy.
std::vector<double> gradient_visitation(const DemoStats& stats, const TabularMdp& mdp,
                                        const Policy& soft_policy, const DpOptions& options,
                                        std::span<const double> warm_start = {});

double log_likelihood(const DemoSet& demos, std::span<const double> w, const FeatureMatrix& features,
                      const TabularMdp& mdp, const LikelihoodOptions& options = {});

std::vector<double> gradient(const DemoSet& demos, std::span<const double> w,
                             const FeatureMatrix& features, const TabularMdp& mdp,
                             const LikelihoodOptions& options = {});

struct AscentTrace {
  WeightVector initial;
  WeightVector final;
  std::vector<double> log_likelihoods;  // at each iterate before its update
  double final_log_likelihood = 0.0;
};

/// m constant-rate gradient steps: w_{k+1} = w_k + lr * grad(w_k).
/// Throws NumericalError naming the step when an iterate goes non-finite.
AscentTrace ascend(std::span<const double> w0, const DemoStats& stats, const FeatureMatrix& features,
                   const TabularMdp& mdp, std::size_t m, double lr,
                   const LikelihoodOptions& options = {});

/// Plain MaxEnt: `epochs` steps from weights uniform in [-1, 1].
WeightVector maxent_baseline(const DemoSet& demos, const FeatureMatrix& features,
                             const TabularMdp& mdp, std::size_t epochs, double lr,
                             std::uint64_t seed, const LikelihoodOptions& options = {});

/// Optimal deterministic policy for reward features * w.
Policy policy_for_weights(std::span<const double> w, const FeatureMatrix& features,
                          const TabularMdp& mdp, const DpOptions& options = {});

/// EVD under true_mdp of the optimal policy for features * w.
double evd_for_weights(std::span<const double> w, const FeatureMatrix& features,
                       const TabularMdp& true_mdp, const DpOptions& options = {});

}  // namespace sirl
