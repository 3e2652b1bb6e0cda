#include "sirl/mcem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "sirl/error.hpp"
#include "sirl/random.hpp"

namespace sirl {

namespace {

constexpr std::uint64_t kInitStream = 0x1a17;
constexpr std::uint64_t kGmmStream = 0x6e33;

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + item + "' in checkpoint");
    }
  }
  return out;
}

std::string expect_line(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("checkpoint truncated before '" + key + "'");
  if (line.rfind(key + "=", 0) != 0) throw ConfigError("checkpoint expected '" + key + "=' but read '" + line + "'");
  return line.substr(key.size() + 1);
}

}  // namespace

void McemConfig::validate() const {
  if (!(epsilon_rep > 0.0 && epsilon_rep <= 1.0)) throw ConfigError("epsilon_rep must lie in (0, 1]");
  if (components == 0) throw ConfigError("components must be positive");
  if (n0 < components) throw ConfigError("n0 must be at least the component count");
  if (!(growth > 1.0)) throw ConfigError("growth must exceed 1 so that sum 1/N_t is finite");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be finite and non-negative");
  if (!(delta_mcem > 0.0)) throw ConfigError("delta_mcem must be positive");
  if (!(epsilon_mcem > 0.0)) throw ConfigError("epsilon_mcem must be positive");
  if (max_outer_iters == 0) throw ConfigError("max_outer_iters must be positive");
  if (gmm_max_iter == 0) throw ConfigError("gmm_max_iter must be positive");
  if (!(init_mean_range >= 0.0)) throw ConfigError("init_mean_range must be non-negative");
}

std::size_t representative_size(std::size_t n_demos, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon_rep must lie in (0, 1]");
  // 0.95 * 20 is 18.999...; the slack keeps exact products exact.
  const auto k = static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(n_demos) - 1e-9));
  return std::clamp<std::size_t>(k, n_demos ? 1 : 0, n_demos);
}

TrajectoryElementSet sample_trajectory_set(std::size_t n_demos, double epsilon, Rng& rng) {
  if (n_demos == 0) throw ConfigError("no demonstrations to sample from");
  const auto k = representative_size(n_demos, epsilon);
  std::vector<std::size_t> idx(n_demos);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_demos - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return {std::move(idx)};
}

TrajectoryElementSet sample_trajectory_set(std::size_t n_demos, double epsilon, std::uint64_t seed) {
  Rng rng(seed);
  return sample_trajectory_set(n_demos, epsilon, rng);
}

McemState initial_state(std::size_t dim, const McemConfig& config) {
  config.validate();
  if (dim == 0) throw ShapeError("weight dimension must be positive");
  auto rng = make_rng(config.seed, {kInitStream});
  std::uniform_real_distribution<double> u(-config.init_mean_range, config.init_mean_range);
  McemState state;
  for (std::size_t k = 0; k < config.components; ++k) {
    std::vector<double> mean(dim);
    for (auto& x : mean) x = config.init_mean_range > 0.0 ? u(rng) : 0.0;
    state.theta2.means.push_back(std::move(mean));
    state.theta2.variances.emplace_back(dim, 1.0);
    state.theta2.mixing.push_back(1.0 / static_cast<double>(config.components));
  }
  state.t = 0;
  state.n_t = config.n0;
  return state;
}

double relative_change(const Gmm& previous, const Gmm& current, double delta) {
  const auto a = flatten(canonical(previous));
  const auto b = flatten(canonical(current));
  if (a.size() != b.size()) throw ShapeError("mixtures differ in shape");
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, std::abs(b[j] - a[j]) / (std::abs(b[j]) + delta));
  }
  return worst;
}

bool termination_check(std::span<const double> history, double epsilon) {
  if (history.size() < 3) return false;
  return std::all_of(history.end() - 3, history.end(), [&](double x) { return x < epsilon; });
}

TaskResult run_learning_task(const McemState& state, std::size_t i, const DemoSet& demos,
                             const FeatureMatrix& features, const TabularMdp& mdp,
                             const McemConfig& config) {
  auto rng = make_rng(config.seed, {state.t, i});
  auto start = sample(state.theta2, 1, rng).front();
  const auto subset = sample_trajectory_set(demos.size(), config.epsilon_rep, rng);
  if (config.m == 0) return {std::move(start), 0.0};
  const auto stats = summarize(demos, subset.indices, mdp.n_states(), mdp.n_actions());
  auto trace = ascend(start, stats, features, mdp, config.m, config.lr, config.likelihood);
  return {std::move(trace.final), trace.final_log_likelihood - trace.log_likelihoods.front()};
}

McemState mcem_iteration(const McemState& state, const DemoSet& demos, const FeatureMatrix& features,
                         const TabularMdp& mdp, const McemConfig& config, IterationRecord* record) {
  config.validate();
  state.theta2.validate();
  if (state.theta2.dim() != features.cols()) throw ShapeError("mixture dimension must equal the feature count");
  const auto n = state.n_t;

  std::vector<TaskResult> results(n);
  try {
    detail::parallel_for(n, config.threads, [&](std::size_t i) {
      try {
        results[i] = run_learning_task(state, i, demos, features, mdp, config);
      } catch (const NumericalError& e) {
        throw NumericalError("task " + std::to_string(i) + ": " + e.what());
      }
    });
  } catch (const NumericalError& e) {
    throw NumericalError("MCEM iteration " + std::to_string(state.t + 1) + ", " + e.what());
  }

  McemState next;
  next.theta1.reserve(n);
  double gain = 0.0;
  for (auto& r : results) {
    gain += r.ll_gain;
    next.theta1.push_back(std::move(r.weights));
  }

  std::optional<Gmm> init;
  if (state.t > 0) init = state.theta2;
  FitResult fitted;
  try {
    fitted = fit(next.theta1, config.components, init, derive_seed(config.seed, {state.t, kGmmStream}),
                 {config.gmm_max_iter, config.gmm_tol});
  } catch (const NumericalError& e) {
    throw NumericalError("MCEM iteration " + std::to_string(state.t + 1) + ", mixture fit: " + e.what());
  }
  next.theta2 = std::move(fitted.gmm);
  next.t = state.t + 1;
  next.n_t = static_cast<std::size_t>(std::ceil(config.growth * static_cast<double>(n)));
  next.history = state.history;
  const double change = relative_change(state.theta2, next.theta2, config.delta_mcem);
  next.history.push_back(change);

  if (record) {
    record->t = next.t;
    record->n_t = n;
    record->theta2_rel_change = change;
    record->mean_ll_gain = gain / static_cast<double>(n);
  }
  return next;
}

McemResult run_loop(McemState initial, const IterationFn& step, const McemConfig& config,
                    const IterationObserver& observer) {
  McemResult result;
  result.state = std::move(initial);
  if (termination_check(result.state.history, config.epsilon_mcem)) result.converged = true;
  while (!result.converged && result.state.t < config.max_outer_iters) {
    const auto started = std::chrono::steady_clock::now();
    IterationRecord record;
    auto next = step(result.state, record);
    if (next.t <= result.state.t) throw ConfigError("iteration step must advance t");
    if (next.t > 0 && next.n_t <= result.state.n_t) throw ConfigError("sample size must strictly increase");
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.state = std::move(next);
    result.log.push_back(record);
    if (observer) observer(result.state, record);
    result.converged = termination_check(result.state.history, config.epsilon_mcem);
  }
  result.theta_star = result.state.theta2;
  return result;
}

McemResult run(const DemoSet& demos, const FeatureMatrix& features, const TabularMdp& mdp,
               const McemConfig& config, std::optional<McemState> resume,
               const IterationObserver& observer) {
  config.validate();
  validate(demos, mdp.n_states(), mdp.n_actions());
  if (demos.size() == 0) throw ConfigError("no demonstrations");
  auto initial = resume ? std::move(*resume) : initial_state(features.cols(), config);
  auto step = [&](const McemState& s, IterationRecord& rec) {
    return mcem_iteration(s, demos, features, mdp, config, &rec);
  };
  return run_loop(std::move(initial), step, config, observer);
}

void write_checkpoint(std::ostream& out, const McemState& state) {
  out << "mcem-checkpoint 1\n" << std::setprecision(17);
  out << "t=" << state.t << '\n' << "n_t=" << state.n_t << '\n' << "history=";
  for (std::size_t j = 0; j < state.history.size(); ++j) out << (j ? "," : "") << state.history[j];
  const auto dim = state.theta1.empty() ? 0 : state.theta1.front().size();
  out << '\n' << "theta1=" << state.theta1.size() << ' ' << dim << '\n';
  for (const auto& w : state.theta1) {
    for (std::size_t j = 0; j < w.size(); ++j) out << (j ? "," : "") << w[j];
    out << '\n';
  }
  write_gmm(out, state.theta2);
}

McemState read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "mcem-checkpoint 1") throw ConfigError("not an MCEM checkpoint");
  McemState state;
  try {
    state.t = std::stoull(expect_line(in, "t"));
    state.n_t = std::stoull(expect_line(in, "n_t"));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("checkpoint counters are malformed");
  }
  const auto history = expect_line(in, "history");
  if (!history.empty()) state.history = parse_row(history);
  std::istringstream shape(expect_line(in, "theta1"));
  std::size_t count = 0, dim = 0;
  if (!(shape >> count >> dim)) throw ConfigError("checkpoint theta1 header is malformed");
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw ConfigError("checkpoint truncated inside theta1");
    state.theta1.push_back(parse_row(line));
    if (state.theta1.back().size() != dim) throw ShapeError("checkpoint weight has the wrong dimension");
  }
  state.theta2 = read_gmm(in);
  return state;
}

}  // namespace sirl
