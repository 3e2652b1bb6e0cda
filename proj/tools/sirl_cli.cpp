// sirl: objectworld experiments for stochastic inverse reinforcement learning.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sirl/error.hpp"
#include "sirl/experiments.hpp"
#include "sirl/io.hpp"

namespace ex = sirl::experiments;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method;
  bool full_scale = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--method", c.method, "maxent, sirl, random, or a comma list");
  cmd->add_flag("--full-scale", c.full_scale, "long sweep axes and the full outer-iteration cap");
}

ex::ExperimentConfig resolve(const Common& c) {
  auto config = c.config.empty() ? ex::ExperimentConfig{} : ex::load_config(c.config);
  if (c.seed) config.seed = *c.seed;
  if (!c.out.empty()) config.out = c.out;
  if (!c.method.empty()) config.methods = sirl::io::split(c.method);
  if (c.full_scale) ex::apply_full_scale(config);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic inverse reinforcement learning on objectworld"};
  app.require_subcommand(1);

  Common common;
  auto* gen = app.add_subcommand("gen-world", "write an instance, its true reward, optimal value and policy");
  add_common(gen, common);

  auto* recovery = app.add_subcommand("recovery", "train each method and score it by EVD");
  add_common(recovery, common);
  std::string resume;
  recovery->add_option("--resume", resume, "continue SIRL from an MCEM checkpoint");

  auto* robust = app.add_subcommand("robustness", "sample a diverse low-EVD solution set from the mixture");
  add_common(robust, common);
  std::string gmm_file;
  std::optional<std::size_t> n;
  std::optional<double> delta, epsilon;
  robust->add_option("--gmm", gmm_file, "trained mixture (trained inline when omitted)");
  robust->add_option("-n,--n", n, "solution set size");
  robust->add_option("--delta", delta, "minimum distance between members");
  robust->add_option("--epsilon", epsilon, "EVD admission threshold");

  auto* sweep = app.add_subcommand("sweep", "hyperparameter sweep with replications");
  add_common(sweep, common);
  std::string axis, values;
  std::optional<std::size_t> replications;
  sweep->add_option("--axis", axis, "n_demos, traj_len or epsilon_rep");
  sweep->add_option("--values", values, "comma-separated axis values");
  sweep->add_option("--replications", replications, "replications per value");

  auto* eval = app.add_subcommand("eval-evd", "score an external weight CSV against an instance");
  add_common(eval, common);
  std::string world_file, weights_file, features = "discrete";
  eval->add_option("--world", world_file, "instance file")->required();
  eval->add_option("--weights", weights_file, "single-line weight CSV")->required();
  eval->add_option("--features", features, "continuous or discrete");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ex::Status status = ex::Status::kOk;
    if (*gen) {
      status = ex::cmd_gen_world(resolve(common));
    } else if (*recovery) {
      auto config = resolve(common);
      status = ex::cmd_recovery(config, resume.empty() ? std::nullopt : std::optional<std::filesystem::path>(resume));
      std::cout << "results written to " << (config.out / "results.csv").string() << '\n';
    } else if (*robust) {
      auto config = resolve(common);
      if (n) config.robustness.n = *n;
      if (delta) config.robustness.delta = *delta;
      if (epsilon) config.robustness.epsilon = *epsilon;
      config.validate();
      status = ex::cmd_robustness(config, gmm_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(gmm_file));
      if (status != ex::Status::kOk) std::cerr << "solution set incomplete; see the header of solution_set.csv\n";
    } else if (*sweep) {
      auto config = resolve(common);
      if (!axis.empty()) config.sweep.axis = ex::parse_axis(axis);
      if (!values.empty()) {
        config.sweep.values.clear();
        for (const auto& v : sirl::io::split(values)) config.sweep.values.push_back(sirl::io::parse_double(v));
      }
      if (replications) config.sweep.replications = *replications;
      config.validate();
      status = ex::cmd_sweep(config);
    } else if (*eval) {
      auto in = sirl::io::open_input(world_file);
      const auto instance = sirl::objectworld::read_instance(in);
      auto win = sirl::io::open_input(weights_file);
      const auto w = sirl::io::read_weights(win);
      const double e = ex::cmd_eval_evd(instance, sirl::objectworld::parse_feature_variant(features), w);
      std::cout << "evd=" << sirl::io::format_double(e) << '\n';
    }
    if (status == ex::Status::kNotConverged) std::cerr << "warning: not converged; results are flagged\n";
    return static_cast<int>(status);
  } catch (const sirl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
