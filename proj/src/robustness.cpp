#include "sirl/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "sirl/error.hpp"
#include "sirl/maxent.hpp"

namespace sirl {

double frobenius_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("weight dimensions differ");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(acc);
}

SolutionSet generate_solution_set(const Gmm& gmm, const TabularMdp& true_mdp,
                                  const FeatureMatrix& features, const GenerativeOptions& options) {
  gmm.validate();
  if (gmm.dim() != features.cols()) throw ShapeError("mixture dimension must equal the feature count");
  if (options.target == 0) throw ConfigError("solution set size must be positive");
  if (!(options.delta >= 0.0)) throw ConfigError("delta must be non-negative");
  const auto max_draws = options.max_draws ? options.max_draws : 100 * options.target;

  SolutionSet set;
  set.delta = options.delta;
  set.epsilon = options.epsilon;

  Rng rng(options.seed);
  // EVDs are evaluated a batch at a time; admission walks the batch in draw
  // order. The batch size is fixed so the draw sequence ignores thread count.
  constexpr std::size_t batch = 16;
  while (set.members.size() < options.target && set.draws < max_draws) {
    const auto count = std::min(batch, max_draws - set.draws);
    auto candidates = sample(gmm, count, rng);
    std::vector<double> evds(count);
    detail::parallel_for(count, options.threads, [&](std::size_t i) {
      evds[i] = evd_for_weights(candidates[i], features, true_mdp, options.dp);
    });
    for (std::size_t i = 0; i < count && set.members.size() < options.target; ++i) {
      ++set.draws;
      if (!(evds[i] < options.epsilon)) continue;
      const bool separated = std::all_of(set.members.begin(), set.members.end(), [&](const WeightVector& m) {
        return frobenius_distance(candidates[i], m) > options.delta;
      });
      if (!separated) continue;
      set.members.push_back(std::move(candidates[i]));
      set.evds.push_back(evds[i]);
    }
  }
  set.complete = set.members.size() == options.target;
  return set;
}

std::vector<std::string> verify(const SolutionSet& set, const TabularMdp& true_mdp,
                                const FeatureMatrix& features, const DpOptions& dp) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    for (std::size_t j = i + 1; j < set.members.size(); ++j) {
      const double d = frobenius_distance(set.members[i], set.members[j]);
      if (!(d > set.delta)) {
        problems.push_back("members " + std::to_string(i) + " and " + std::to_string(j) +
                           " are only " + std::to_string(d) + " apart");
      }
    }
    const double e = evd_for_weights(set.members[i], features, true_mdp, dp);
    if (!(e < set.epsilon)) {
      problems.push_back("member " + std::to_string(i) + " has EVD " + std::to_string(e));
    }
  }
  return problems;
}

}  // namespace sirl
