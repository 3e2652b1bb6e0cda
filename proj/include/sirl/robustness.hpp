#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sirl/features.hpp"
#include "sirl/gmm.hpp"
#include "sirl/mdp.hpp"

namespace sirl {

/// Euclidean norm of the difference, i.e. sqrt(Tr((w - w')(w - w')^T)).
double frobenius_distance(std::span<const double> a, std::span<const double> b);

struct SolutionSet {
  std::vector<WeightVector> members;
  std::vector<double> evds;
  double delta = 0.0;
  double epsilon = 0.0;
  std::size_t draws = 0;
  bool complete = false;
};

struct GenerativeOptions {
  std::size_t target = 5;
  double delta = 1.0;
  double epsilon = 15.0;
  std::size_t max_draws = 0;  // 0: 100 * target
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  DpOptions dp{};
};

/// Rejection sampling from the mixture: a draw joins the set iff it is
/// farther than delta from every member and its EVD is below epsilon.
/// Stops at `target` members or after max_draws draws (complete = false).
SolutionSet generate_solution_set(const Gmm& gmm, const TabularMdp& true_mdp,
                                  const FeatureMatrix& features, const GenerativeOptions& options);

/// Re-checks both admission constraints; returns human-readable violations.
std::vector<std::string> verify(const SolutionSet& set, const TabularMdp& true_mdp,
                                const FeatureMatrix& features, const DpOptions& dp = {});

}  // namespace sirl
