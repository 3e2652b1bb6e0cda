#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sirl/demos.hpp"
#include "sirl/features.hpp"
#include "sirl/gmm.hpp"
#include "sirl/mcem.hpp"
#include "sirl/mdp.hpp"
#include "sirl/objectworld.hpp"
#include "sirl/robustness.hpp"

namespace sirl::experiments {

struct WorldConfig {
  std::size_t grid_size = 10;
  std::size_t n_objects = 25;
  std::size_t n_colors = 2;
  double wind = 0.3;
  double discount = 0.9;
};

struct DemoConfig {
  std::size_t n_demos = 20;
  std::size_t trajectory_length = 5;
};

struct MaxEntConfig {
  std::size_t epochs = 20;
  double lr = 0.01;
};

struct RobustnessConfig {
  std::size_t n = 5;
  double delta = 1.0;
  double epsilon = 15.0;
  std::size_t max_draws = 0;  // 0: 100 * n
};

enum class Axis { kDemos, kTrajectoryLength, kEpsilonRep };

struct SweepConfig {
  Axis axis = Axis::kDemos;
  std::vector<double> values;  // empty: the default axis for the scale
  std::size_t replications = 3;
};

/// Method names: "maxent", "sirl", and "random" (a uniform [-1, 1] weight
/// draw, the floor every learner should beat).
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  WorldConfig world;
  DemoConfig demos;
  objectworld::FeatureVariant features = objectworld::FeatureVariant::kDiscrete;
  std::vector<std::string> methods{"maxent", "sirl"};
  MaxEntConfig maxent;
  McemConfig mcem = desk_mcem();
  RobustnessConfig robustness;
  SweepConfig sweep;
  std::size_t threads = 0;
  bool full_scale = false;

  /// Reference hyperparameters with the outer-iteration cap cut to 8.
  static McemConfig desk_mcem();
  void validate() const;
};

/// JSON with sections world, demos, maxent, mcem, robustness, sweep.
/// Missing keys keep their defaults; unknown keys throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& config);

/// Long sweep axes and the full outer-iteration cap.
void apply_full_scale(ExperimentConfig& config);
std::vector<double> default_axis(Axis axis, bool full_scale);
std::string to_string(Axis axis);
Axis parse_axis(const std::string& name);

/// Independent streams derived from the master seed. The world depends on
/// the master seed only; demos and learners also on the replication.
std::uint64_t world_seed(const ExperimentConfig& config);
std::uint64_t demo_seed(const ExperimentConfig& config, std::size_t replication);
std::uint64_t method_seed(const ExperimentConfig& config, const std::string& method, std::size_t replication);

struct World {
  objectworld::Instance instance;
  TabularMdp mdp;
  FeatureMatrix features;
  Solution optimal;
};

World build_world(const ExperimentConfig& config);
World build_world(const objectworld::Instance& instance, objectworld::FeatureVariant variant);

/// Optimal-policy rollouts. A larger n_demos with the same seed extends the
/// smaller set, so sweep cells share their demonstrations.
DemoSet make_demos(const World& world, const DemoConfig& demos, std::uint64_t seed);

struct MethodOutcome {
  std::string method;
  WeightVector weights;
  double evd = 0.0;
  bool converged = true;
  double seconds = 0.0;
  std::optional<McemResult> mcem;  // sirl only
};

/// Trains each configured method and scores it by EVD on the true MDP.
/// SIRL is scored by the mixture's overall mean weight.
std::vector<MethodOutcome> run_recovery(const World& world, const DemoSet& demos,
                                        const ExperimentConfig& config, std::size_t replication = 0,
                                        const IterationObserver& observer = {},
                                        std::optional<McemState> resume = std::nullopt);

SolutionSet run_robustness(const World& world, const Gmm& gmm, const ExperimentConfig& config);

struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t replication = 0;
  std::size_t n_demos = 0;
  std::size_t trajectory_length = 0;
  double epsilon_rep = 0.0;
  double evd = 0.0;
  std::string status = "ok";  // ok | not_converged | error
  double wall_seconds = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Result CSVs omit wall_seconds so that reruns are byte-identical;
/// write_timing keeps it alongside the row keys.
void write_results(std::ostream& out, std::span<const ResultRow> rows);
std::vector<ResultRow> read_results(std::istream& in);
void write_timing(std::ostream& out, std::span<const ResultRow> rows);

struct SummaryRow {
  double value = 0.0;
  std::string method;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double mean_evd = 0.0;
  double stderr_evd = 0.0;  // sample sd / sqrt(n_ok); 0 for a single replication
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
};

/// Every value x replication cell runs recovery for each method; cells run
/// as an independent job pool and failures become "error" rows.
SweepResult run_sweep(const ExperimentConfig& config);
void write_summary(std::ostream& out, Axis axis, std::span<const SummaryRow> rows);

/// Number of adjacent increases in a sequence that should not increase.
std::size_t inversions(std::span<const double> means);

/// Mean EVD series for one method, in axis order.
std::vector<double> mean_series(std::span<const SummaryRow> summary, const std::string& method);

enum class Status { kOk = 0, kNotConverged = 3 };

/// Command bodies behind the CLI. Each writes under config.out.
Status cmd_gen_world(const ExperimentConfig& config);
Status cmd_recovery(const ExperimentConfig& config, const std::optional<std::filesystem::path>& resume = {});
Status cmd_robustness(const ExperimentConfig& config, const std::optional<std::filesystem::path>& gmm_file = {});
Status cmd_sweep(const ExperimentConfig& config);
double cmd_eval_evd(const objectworld::Instance& instance, objectworld::FeatureVariant variant,
                    std::span<const double> weights);

}  // namespace sirl::experiments
