#include "sirl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"
#include "sirl/error.hpp"
#include "sirl/io.hpp"
#include "sirl/maxent.hpp"
#include "sirl/random.hpp"

namespace sirl::experiments {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kWorldStream = 0x301d;
constexpr std::uint64_t kDemoStream = 0xde30;
constexpr std::uint64_t kMethodStream = 0x3e7d;
constexpr std::uint64_t kRobustStream = 0x20b5;

// FNV-1a; std::hash is not stable across standard libraries.
std::uint64_t name_key(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <class T>
void get(const json& j, const char* key, const std::string& where, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + (where.empty() ? std::string(key) : where + "." + key) + "' has the wrong type");
  }
}

void finite_nonneg(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be finite and non-negative");
}

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& body) {
  auto out = io::open_output(path);
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_truth(const World& world, const DemoSet& demos, const std::filesystem::path& dir) {
  const auto n = world.instance.grid_size;
  write_file(dir / "world.txt", [&](std::ostream& o) { objectworld::write_instance(o, world.instance); });
  write_file(dir / "true_reward.csv", [&](std::ostream& o) { io::write_grid(o, world.mdp.reward(), n); });
  write_file(dir / "optimal_value.csv", [&](std::ostream& o) { io::write_grid(o, world.optimal.values, n); });
  write_file(dir / "optimal_policy.csv",
             [&](std::ostream& o) { io::write_grid(o, std::span(world.optimal.policy.actions()), n); });
  write_file(dir / "features.csv", [&](std::ostream& o) { io::write_features(o, world.features); });
  write_file(dir / "demos.csv", [&](std::ostream& o) { io::write_demos(o, demos); });
}

void write_heatmaps(const World& world, std::span<const double> w, const std::filesystem::path& reward_path,
                    const std::filesystem::path& value_path) {
  const auto reward = reward_from_weights(w, world.features);
  const auto solved = value_iteration(world.mdp.with_reward(reward));
  const auto n = world.instance.grid_size;
  write_file(reward_path, [&](std::ostream& o) { io::write_grid(o, reward, n); });
  write_file(value_path, [&](std::ostream& o) { io::write_grid(o, solved.values, n); });
}

McemConfig learner_config(const ExperimentConfig& config, std::size_t replication, std::size_t threads) {
  auto mcem = config.mcem;
  mcem.seed = method_seed(config, "sirl", replication);
  mcem.threads = threads;
  return mcem;
}

std::vector<ResultRow> rows_for(const ExperimentConfig& config, std::size_t replication,
                                const std::vector<MethodOutcome>& outcomes) {
  std::vector<ResultRow> rows;
  for (const auto& o : outcomes) {
    rows.push_back({o.method, config.seed, replication, config.demos.n_demos, config.demos.trajectory_length,
                    config.mcem.epsilon_rep, o.evd, o.converged ? "ok" : "not_converged", o.seconds});
  }
  return rows;
}

Status worst(std::span<const ResultRow> rows) {
  for (const auto& r : rows) {
    if (r.status != "ok") return Status::kNotConverged;
  }
  return Status::kOk;
}

}  // namespace

McemConfig ExperimentConfig::desk_mcem() {
  McemConfig c;
  c.max_outer_iters = 8;
  return c;
}

void ExperimentConfig::validate() const {
  if (world.grid_size < 2) throw ConfigError("grid_size must be at least 2");
  if (world.n_colors < 2) throw ConfigError("n_colors must be at least 2");
  if (world.n_objects > world.grid_size * world.grid_size) throw ConfigError("more objects than cells");
  if (!(world.wind >= 0.0 && world.wind <= 1.0)) throw ConfigError("wind must lie in [0, 1]");
  if (!(world.discount >= 0.0 && world.discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  if (demos.n_demos == 0) throw ConfigError("n_demos must be positive");
  if (demos.trajectory_length == 0) throw ConfigError("trajectory_length must be positive");
  if (methods.empty()) throw ConfigError("at least one method is required");
  for (const auto& m : methods) {
    if (m != "maxent" && m != "sirl" && m != "random") throw ConfigError("unknown method '" + m + "'");
  }
  finite_nonneg(maxent.lr, "maxent.lr");
  mcem.validate();
  if (robustness.n == 0) throw ConfigError("robustness.n must be positive");
  finite_nonneg(robustness.delta, "robustness.delta");
  if (!(robustness.epsilon > 0.0)) throw ConfigError("robustness.epsilon must be positive");
  if (sweep.replications == 0) throw ConfigError("sweep.replications must be positive");
  for (double v : sweep.values) {
    switch (sweep.axis) {
      case Axis::kDemos:
      case Axis::kTrajectoryLength:
        if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sweep values must be positive integers");
        break;
      case Axis::kEpsilonRep:
        if (!(v > 0.0 && v <= 1.0)) throw ConfigError("epsilon_rep sweep values must lie in (0, 1]");
        break;
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "", {"seed", "out", "world", "demos", "features", "methods", "maxent", "mcem", "robustness",
                     "sweep", "threads", "full_scale"});
  ExperimentConfig c;
  get(j, "seed", "", c.seed);
  std::string out = c.out.string();
  get(j, "out", "", out);
  c.out = out;
  get(j, "threads", "", c.threads);
  get(j, "full_scale", "", c.full_scale);
  get(j, "methods", "", c.methods);
  if (j.contains("features")) {
    std::string v;
    get(j, "features", "", v);
    c.features = objectworld::parse_feature_variant(v);
  }
  if (j.contains("world")) {
    const auto& w = j["world"];
    check_keys(w, "world", {"grid_size", "n_objects", "n_colors", "wind", "discount"});
    get(w, "grid_size", "world", c.world.grid_size);
    get(w, "n_objects", "world", c.world.n_objects);
    get(w, "n_colors", "world", c.world.n_colors);
    get(w, "wind", "world", c.world.wind);
    get(w, "discount", "world", c.world.discount);
  }
  if (j.contains("demos")) {
    const auto& d = j["demos"];
    check_keys(d, "demos", {"n_demos", "trajectory_length"});
    get(d, "n_demos", "demos", c.demos.n_demos);
    get(d, "trajectory_length", "demos", c.demos.trajectory_length);
  }
  if (j.contains("maxent")) {
    const auto& m = j["maxent"];
    check_keys(m, "maxent", {"epochs", "lr"});
    get(m, "epochs", "maxent", c.maxent.epochs);
    get(m, "lr", "maxent", c.maxent.lr);
  }
  if (j.contains("mcem")) {
    const auto& m = j["mcem"];
    check_keys(m, "mcem", {"epsilon_rep", "n0", "growth", "m", "lr", "components", "delta_mcem", "epsilon_mcem",
                           "max_outer_iters", "gmm_max_iter", "gmm_tol", "init_mean_range", "soft_tol"});
    get(m, "epsilon_rep", "mcem", c.mcem.epsilon_rep);
    get(m, "n0", "mcem", c.mcem.n0);
    get(m, "growth", "mcem", c.mcem.growth);
    get(m, "m", "mcem", c.mcem.m);
    get(m, "lr", "mcem", c.mcem.lr);
    get(m, "components", "mcem", c.mcem.components);
    get(m, "delta_mcem", "mcem", c.mcem.delta_mcem);
    get(m, "epsilon_mcem", "mcem", c.mcem.epsilon_mcem);
    get(m, "max_outer_iters", "mcem", c.mcem.max_outer_iters);
    get(m, "gmm_max_iter", "mcem", c.mcem.gmm_max_iter);
    get(m, "gmm_tol", "mcem", c.mcem.gmm_tol);
    get(m, "init_mean_range", "mcem", c.mcem.init_mean_range);
    get(m, "soft_tol", "mcem", c.mcem.likelihood.soft.tol);
  }
  if (j.contains("robustness")) {
    const auto& r = j["robustness"];
    check_keys(r, "robustness", {"n", "delta", "epsilon", "max_draws"});
    get(r, "n", "robustness", c.robustness.n);
    get(r, "delta", "robustness", c.robustness.delta);
    get(r, "epsilon", "robustness", c.robustness.epsilon);
    get(r, "max_draws", "robustness", c.robustness.max_draws);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, "sweep", {"axis", "values", "replications"});
    if (s.contains("axis")) {
      std::string axis;
      get(s, "axis", "sweep", axis);
      c.sweep.axis = parse_axis(axis);
    }
    get(s, "values", "sweep", c.sweep.values);
    get(s, "replications", "sweep", c.sweep.replications);
    if (s.contains("values") && c.sweep.values.empty()) throw ConfigError("sweep.values must not be empty");
  }
  if (c.full_scale) apply_full_scale(c);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["threads"] = c.threads;
  j["full_scale"] = c.full_scale;
  j["features"] = objectworld::to_string(c.features);
  j["methods"] = c.methods;
  j["world"] = {{"grid_size", c.world.grid_size}, {"n_objects", c.world.n_objects},
                {"n_colors", c.world.n_colors}, {"wind", c.world.wind}, {"discount", c.world.discount}};
  j["demos"] = {{"n_demos", c.demos.n_demos}, {"trajectory_length", c.demos.trajectory_length}};
  j["maxent"] = {{"epochs", c.maxent.epochs}, {"lr", c.maxent.lr}};
  j["mcem"] = {{"epsilon_rep", c.mcem.epsilon_rep}, {"n0", c.mcem.n0}, {"growth", c.mcem.growth},
               {"m", c.mcem.m}, {"lr", c.mcem.lr}, {"components", c.mcem.components},
               {"delta_mcem", c.mcem.delta_mcem}, {"epsilon_mcem", c.mcem.epsilon_mcem},
               {"max_outer_iters", c.mcem.max_outer_iters}, {"gmm_max_iter", c.mcem.gmm_max_iter},
               {"gmm_tol", c.mcem.gmm_tol}, {"init_mean_range", c.mcem.init_mean_range},
               {"soft_tol", c.mcem.likelihood.soft.tol}};
  j["robustness"] = {{"n", c.robustness.n}, {"delta", c.robustness.delta},
                     {"epsilon", c.robustness.epsilon}, {"max_draws", c.robustness.max_draws}};
  j["sweep"] = {{"axis", to_string(c.sweep.axis)}, {"values", c.sweep.values},
                {"replications", c.sweep.replications}};
  return j.dump(2) + "\n";
}

void apply_full_scale(ExperimentConfig& config) {
  config.full_scale = true;
  config.mcem.max_outer_iters = McemConfig{}.max_outer_iters;
}

std::vector<double> default_axis(Axis axis, bool full_scale) {
  switch (axis) {
    case Axis::kDemos:
      return full_scale ? std::vector<double>{40, 80, 160, 320, 640, 1280, 2560} : std::vector<double>{40, 80, 160, 320};
    case Axis::kTrajectoryLength:
      return full_scale ? std::vector<double>{1, 2, 4, 8, 16, 32, 64} : std::vector<double>{1, 2, 4, 8};
    case Axis::kEpsilonRep:
      return full_scale ? std::vector<double>{0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95}
                        : std::vector<double>{0.65, 0.80, 0.95};
  }
  return {};
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::kDemos: return "n_demos";
    case Axis::kTrajectoryLength: return "traj_len";
    case Axis::kEpsilonRep: return "epsilon_rep";
  }
  return "?";
}

Axis parse_axis(const std::string& name) {
  if (name == "n_demos") return Axis::kDemos;
  if (name == "traj_len") return Axis::kTrajectoryLength;
  if (name == "epsilon_rep") return Axis::kEpsilonRep;
  throw ConfigError("unknown sweep axis '" + name + "' (n_demos, traj_len, epsilon_rep)");
}

std::uint64_t world_seed(const ExperimentConfig& config) { return derive_seed(config.seed, {kWorldStream}); }

std::uint64_t demo_seed(const ExperimentConfig& config, std::size_t replication) {
  return derive_seed(config.seed, {kDemoStream, replication});
}

std::uint64_t method_seed(const ExperimentConfig& config, const std::string& method, std::size_t replication) {
  return derive_seed(config.seed, {kMethodStream, name_key(method), replication});
}

World build_world(const objectworld::Instance& instance, objectworld::FeatureVariant variant) {
  auto mdp = objectworld::true_mdp(instance);
  auto optimal = value_iteration(mdp);
  return World{instance, std::move(mdp), objectworld::features(instance, variant), std::move(optimal)};
}

World build_world(const ExperimentConfig& config) {
  const auto& w = config.world;
  return build_world(objectworld::generate(w.grid_size, w.n_objects, w.n_colors, w.wind, w.discount,
                                           world_seed(config)),
                     config.features);
}

DemoSet make_demos(const World& world, const DemoConfig& demos, std::uint64_t seed) {
  return objectworld::rollout_demos(world.mdp, world.optimal.policy, demos.n_demos, demos.trajectory_length, seed);
}

std::vector<MethodOutcome> run_recovery(const World& world, const DemoSet& demos, const ExperimentConfig& config,
                                        std::size_t replication, const IterationObserver& observer,
                                        std::optional<McemState> resume) {
  std::vector<MethodOutcome> out;
  for (const auto& method : config.methods) {
    const auto started = std::chrono::steady_clock::now();
    MethodOutcome o;
    o.method = method;
    try {
      if (method == "maxent") {
        o.weights = maxent_baseline(demos, world.features, world.mdp, config.maxent.epochs, config.maxent.lr,
                                    method_seed(config, method, replication), config.mcem.likelihood);
      } else if (method == "random") {
        auto rng = make_rng(method_seed(config, method, replication), {});
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        o.weights.resize(world.features.cols());
        for (auto& x : o.weights) x = u(rng);
      } else if (method == "sirl") {
        auto result = run(demos, world.features, world.mdp, learner_config(config, replication, config.threads),
                          resume, observer);
        o.weights = result.theta_star.mean();
        o.converged = result.converged;
        o.mcem = std::move(result);
      } else {
        throw ConfigError("unknown method '" + method + "'");
      }
      o.evd = evd_for_weights(o.weights, world.features, world.mdp);
    } catch (const NumericalError& e) {
      throw NumericalError(method + ": " + e.what());
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.push_back(std::move(o));
  }
  return out;
}

SolutionSet run_robustness(const World& world, const Gmm& gmm, const ExperimentConfig& config) {
  GenerativeOptions opt;
  opt.target = config.robustness.n;
  opt.delta = config.robustness.delta;
  opt.epsilon = config.robustness.epsilon;
  opt.max_draws = config.robustness.max_draws;
  opt.seed = derive_seed(config.seed, {kRobustStream});
  opt.threads = config.threads;
  return generate_solution_set(gmm, world.mdp, world.features, opt);
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << "method,seed,replication,n_demos,trajectory_length,epsilon_rep,evd,status\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.replication << ',' << r.n_demos << ',' << r.trajectory_length
        << ',' << io::format_double(r.epsilon_rep) << ',' << io::format_double(r.evd) << ',' << r.status << '\n';
  }
}

std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "method,seed,replication,n_demos,trajectory_length,epsilon_rep,evd,status") {
    throw ConfigError("result table lacks its header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = io::split(line);
    if (f.size() != 8) throw ConfigError("result row needs 8 fields: '" + line + "'");
    ResultRow r;
    r.method = f[0];
    try {
      r.seed = std::stoull(f[1]);
      r.replication = std::stoull(f[2]);
      r.n_demos = std::stoull(f[3]);
      r.trajectory_length = std::stoull(f[4]);
    } catch (const std::logic_error&) {
      throw ConfigError("malformed integer in result row '" + line + "'");
    }
    r.epsilon_rep = io::parse_double(f[5]);
    r.evd = io::parse_double(f[6]);
    r.status = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_timing(std::ostream& out, std::span<const ResultRow> rows) {
  out << "method,seed,replication,n_demos,trajectory_length,epsilon_rep,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.replication << ',' << r.n_demos << ',' << r.trajectory_length
        << ',' << io::format_double(r.epsilon_rep) << ',' << io::format_double(r.wall_seconds) << '\n';
  }
}

SweepResult run_sweep(const ExperimentConfig& config) {
  const auto values = config.sweep.values.empty() ? default_axis(config.sweep.axis, config.full_scale)
                                                  : config.sweep.values;
  const auto reps = config.sweep.replications;
  const auto world = build_world(config);
  const auto cells = values.size() * reps;
  const auto pool = detail::resolve_threads(config.threads, cells);

  std::vector<std::vector<ResultRow>> cell_rows(cells);
  detail::parallel_for(cells, pool, [&](std::size_t c) {
    const auto vi = c / reps, r = c % reps;
    auto cell = config;
    if (pool > 1) cell.threads = 1;
    switch (config.sweep.axis) {
      case Axis::kDemos: cell.demos.n_demos = static_cast<std::size_t>(values[vi]); break;
      case Axis::kTrajectoryLength: cell.demos.trajectory_length = static_cast<std::size_t>(values[vi]); break;
      case Axis::kEpsilonRep: cell.mcem.epsilon_rep = values[vi]; break;
    }
    try {
      const auto demos = make_demos(world, cell.demos, demo_seed(config, r));
      cell_rows[c] = rows_for(cell, r, run_recovery(world, demos, cell, r));
    } catch (const std::exception&) {
      for (const auto& m : cell.methods) {
        cell_rows[c].push_back({m, cell.seed, r, cell.demos.n_demos, cell.demos.trajectory_length,
                                cell.mcem.epsilon_rep, std::numeric_limits<double>::quiet_NaN(), "error", 0.0});
      }
    }
  });

  SweepResult result;
  for (auto& rows : cell_rows) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (const auto& m : config.methods) {
      SummaryRow s;
      s.value = values[vi];
      s.method = m;
      std::vector<double> evds;
      for (std::size_t r = 0; r < reps; ++r) {
        for (const auto& row : cell_rows[vi * reps + r]) {
          if (row.method != m) continue;
          if (row.status == "error") ++s.n_failed;
          else evds.push_back(row.evd);
        }
      }
      s.n_ok = evds.size();
      if (!evds.empty()) {
        double sum = 0.0;
        for (double e : evds) sum += e;
        s.mean_evd = sum / static_cast<double>(evds.size());
        if (evds.size() > 1) {
          double ss = 0.0;
          for (double e : evds) ss += (e - s.mean_evd) * (e - s.mean_evd);
          s.stderr_evd = std::sqrt(ss / static_cast<double>(evds.size() - 1) / static_cast<double>(evds.size()));
        }
      } else {
        s.mean_evd = std::numeric_limits<double>::quiet_NaN();
      }
      result.summary.push_back(s);
    }
  }
  return result;
}

void write_summary(std::ostream& out, Axis axis, std::span<const SummaryRow> rows) {
  out << to_string(axis) << ",method,n_ok,n_failed,mean_evd,stderr_evd\n";
  for (const auto& s : rows) {
    out << io::format_double(s.value) << ',' << s.method << ',' << s.n_ok << ',' << s.n_failed << ','
        << io::format_double(s.mean_evd) << ',' << io::format_double(s.stderr_evd) << '\n';
  }
}

std::size_t inversions(std::span<const double> means) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (means[i] > means[i - 1]) ++n;
  }
  return n;
}

std::vector<double> mean_series(std::span<const SummaryRow> summary, const std::string& method) {
  std::vector<double> out;
  for (const auto& s : summary) {
    if (s.method == method) out.push_back(s.mean_evd);
  }
  return out;
}

Status cmd_gen_world(const ExperimentConfig& config) {
  config.validate();
  const auto world = build_world(config);
  write_truth(world, make_demos(world, config.demos, demo_seed(config, 0)), config.out);
  return Status::kOk;
}

Status cmd_recovery(const ExperimentConfig& config, const std::optional<std::filesystem::path>& resume) {
  config.validate();
  const auto world = build_world(config);
  const auto demos = make_demos(world, config.demos, demo_seed(config, 0));
  write_truth(world, demos, config.out);

  std::optional<McemState> state;
  if (resume) {
    auto in = io::open_input(*resume);
    state = read_checkpoint(in);
  }
  std::vector<IterationRecord> log;
  auto observer = [&](const McemState& s, const IterationRecord& rec) {
    log.push_back(rec);
    write_file(config.out / "checkpoint.txt", [&](std::ostream& o) { write_checkpoint(o, s); });
    write_file(config.out / "mcem_log.csv", [&](std::ostream& o) { io::write_iteration_log(o, log); });
  };
  const auto outcomes = run_recovery(world, demos, config, 0, observer, state);

  for (const auto& o : outcomes) {
    write_file(config.out / ("weights_" + o.method + ".csv"), [&](std::ostream& s) { io::write_weights(s, o.weights); });
    write_heatmaps(world, o.weights, config.out / ("reward_" + o.method + ".csv"),
                   config.out / ("value_" + o.method + ".csv"));
    if (o.mcem) {
      write_file(config.out / "gmm.txt", [&](std::ostream& s) { write_gmm(s, o.mcem->theta_star); });
    }
  }
  const auto rows = rows_for(config, 0, outcomes);
  write_file(config.out / "results.csv", [&](std::ostream& s) { write_results(s, rows); });
  write_file(config.out / "timing.csv", [&](std::ostream& s) { write_timing(s, rows); });
  return worst(rows);
}

Status cmd_robustness(const ExperimentConfig& config, const std::optional<std::filesystem::path>& gmm_file) {
  config.validate();
  const auto world = build_world(config);
  Gmm gmm;
  if (gmm_file) {
    auto in = io::open_input(*gmm_file);
    gmm = read_gmm(in);
  } else {
    const auto demos = make_demos(world, config.demos, demo_seed(config, 0));
    gmm = run(demos, world.features, world.mdp, learner_config(config, 0, config.threads)).theta_star;
    write_file(config.out / "gmm.txt", [&](std::ostream& s) { write_gmm(s, gmm); });
  }
  const auto set = run_robustness(world, gmm, config);
  write_file(config.out / "solution_set.csv", [&](std::ostream& s) { io::write_solution_set(s, set); });
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    const auto stem = "member_" + std::to_string(i);
    write_heatmaps(world, set.members[i], config.out / (stem + "_reward.csv"), config.out / (stem + "_value.csv"));
  }
  return set.complete ? Status::kOk : Status::kNotConverged;
}

Status cmd_sweep(const ExperimentConfig& config) {
  config.validate();
  const auto result = run_sweep(config);
  write_file(config.out / "sweep.csv", [&](std::ostream& s) { write_results(s, result.rows); });
  write_file(config.out / "sweep_summary.csv",
             [&](std::ostream& s) { write_summary(s, config.sweep.axis, result.summary); });
  write_file(config.out / "timing.csv", [&](std::ostream& s) { write_timing(s, result.rows); });
  for (const auto& r : result.rows) {
    if (r.status == "error") throw NumericalError("sweep finished with failed cells (marked 'error' in sweep.csv)");
  }
  return worst(result.rows);
}

double cmd_eval_evd(const objectworld::Instance& instance, objectworld::FeatureVariant variant,
                    std::span<const double> weights) {
  const auto world = build_world(instance, variant);
  if (weights.size() != world.features.cols()) {
    throw ShapeError("weight vector has " + std::to_string(weights.size()) + " entries; the " +
                     objectworld::to_string(variant) + " features need " + std::to_string(world.features.cols()));
  }
  return evd_for_weights(weights, world.features, world.mdp);
}

}  // namespace sirl::experiments
