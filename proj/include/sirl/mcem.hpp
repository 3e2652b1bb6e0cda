#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sirl/demos.hpp"
#include "sirl/features.hpp"
#include "sirl/gmm.hpp"
#include "sirl/maxent.hpp"
#include "sirl/mdp.hpp"

namespace sirl {

struct McemConfig {
  double epsilon_rep = 0.95;       // representative subset fraction
  std::size_t n0 = 10;             // initial Monte Carlo sample size
  double growth = 2.0;             // N_{t+1} = ceil(growth * N_t)
  std::size_t m = 20;              // ascent steps per learning task
  double lr = 0.01;
  std::size_t components = 3;
  double delta_mcem = 1e-3;
  double epsilon_mcem = 5e-2;
  std::size_t max_outer_iters = 15;
  std::size_t gmm_max_iter = 1000;
  double gmm_tol = 1e-6;
  double init_mean_range = 1.0;    // initial means uniform in [-range, range], unit variances
  std::uint64_t seed = 0;
  std::size_t threads = 0;         // 0: hardware concurrency
  LikelihoodOptions likelihood;

  void validate() const;
};

/// Profile parameter after an iteration: m-step weights and the fitted mixture.
struct McemState {
  std::vector<WeightVector> theta1;
  Gmm theta2;
  std::size_t t = 0;
  std::size_t n_t = 0;
  std::vector<double> history;  // relative change of theta2 per iteration

  friend bool operator==(const McemState&, const McemState&) = default;
};

struct TrajectoryElementSet {
  std::vector<std::size_t> indices;
};

/// ceil(epsilon * n_demos)
std::size_t representative_size(std::size_t n_demos, double epsilon);

/// Uniform subset of exactly representative_size() demonstration indices.
TrajectoryElementSet sample_trajectory_set(std::size_t n_demos, double epsilon, Rng& rng);
TrajectoryElementSet sample_trajectory_set(std::size_t n_demos, double epsilon, std::uint64_t seed);

/// t = 0, N_0 = n0, random mixture: means uniform in [-range, range].
McemState initial_state(std::size_t dim, const McemConfig& config);

/// max_j |x_t - x_{t-1}| / (|x_t| + delta) over flatten(canonical(.)).
double relative_change(const Gmm& previous, const Gmm& current, double delta);

/// True iff the last three entries are all below epsilon.
bool termination_check(std::span<const double> history, double epsilon);

struct TaskResult {
  WeightVector weights;
  double ll_gain = 0.0;
};

/// Learning task i of iteration state.t: draws a weight from theta2 and a
/// subset of demos from the stream keyed (seed, t, i), then ascends.
TaskResult run_learning_task(const McemState& state, std::size_t i, const DemoSet& demos,
                             const FeatureMatrix& features, const TabularMdp& mdp,
                             const McemConfig& config);

struct IterationRecord {
  std::size_t t = 0;
  std::size_t n_t = 0;
  double theta2_rel_change = 0.0;
  double mean_ll_gain = 0.0;
  double seconds = 0.0;
};

/// One outer iteration: parallel first stage over N_t tasks, GMM refit
/// warm-started at theta2 (cold start at t = 0), sample-size growth.
McemState mcem_iteration(const McemState& state, const DemoSet& demos, const FeatureMatrix& features,
                         const TabularMdp& mdp, const McemConfig& config,
                         IterationRecord* record = nullptr);

struct McemResult {
  Gmm theta_star;
  bool converged = false;
  std::vector<IterationRecord> log;
  McemState state;
};

using IterationFn = std::function<McemState(const McemState&, IterationRecord&)>;
using IterationObserver = std::function<void(const McemState&, const IterationRecord&)>;

/// Drives `step` until termination_check holds or state.t reaches
/// max_outer_iters.
McemResult run_loop(McemState initial, const IterationFn& step, const McemConfig& config,
                    const IterationObserver& observer = {});

McemResult run(const DemoSet& demos, const FeatureMatrix& features, const TabularMdp& mdp,
               const McemConfig& config, std::optional<McemState> resume = std::nullopt,
               const IterationObserver& observer = {});

void write_checkpoint(std::ostream& out, const McemState& state);
McemState read_checkpoint(std::istream& in);

}  // namespace sirl
