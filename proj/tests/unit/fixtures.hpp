#pragma once

#include <memory>
#include <random>
#include <vector>

#include "sirl/features.hpp"
#include "sirl/mdp.hpp"

namespace fixtures {

// State 0: action 0 self-loops, action 1 moves to state 1. State 1 absorbs.
inline sirl::TabularMdp chain(double discount = 0.9) {
  std::vector<double> t = {
      1, 0,  0, 1,  // s0: stay, go
      0, 1,  0, 1,  // s1: absorbing
  };
  auto tr = std::make_shared<const sirl::Transitions>(sirl::Transitions::from_dense(2, 2, t));
  return sirl::TabularMdp(tr, {0.0, 1.0}, discount);
}

inline std::vector<double> random_tensor(std::size_t n, std::size_t a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(n * a * n);
  for (std::size_t r = 0; r < n * a; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += t[r * n + j] = u(rng);
    for (std::size_t j = 0; j < n; ++j) t[r * n + j] /= sum;
  }
  return t;
}

inline sirl::TabularMdp random_mdp(std::size_t n, std::size_t a, double discount, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto t = random_tensor(n, a, rng);
  std::vector<double> r(n);
  for (auto& x : r) x = u(rng);
  return sirl::TabularMdp(std::make_shared<const sirl::Transitions>(sirl::Transitions::from_dense(n, a, t)), r,
                          discount);
}

inline sirl::FeatureMatrix random_features(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  sirl::FeatureMatrix f(n, d);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < d; ++j) f(s, j) = u(rng);
  return f;
}

}  // namespace fixtures
