#include <doctest.h>

#include <limits>

#include "sirl/error.hpp"
#include "sirl/maxent.hpp"
#include "sirl/objectworld.hpp"
#include "sirl/robustness.hpp"

using namespace sirl;
namespace ow = sirl::objectworld;

namespace {

struct Fixture {
  ow::Instance world = ow::generate(6, 8, 2, 0.3, 0.9, 4);
  TabularMdp mdp = ow::true_mdp(world);
  FeatureMatrix features = ow::features_continuous(world);
  Gmm gmm;

  Fixture() {
    gmm.mixing = {0.5, 0.5};
    gmm.means = {{-1.0, 0.5, 0.0, 1.0}, {0.5, -0.5, 1.0, 0.0}};
    gmm.variances = {{0.5, 0.5, 0.5, 0.5}, {1.0, 1.0, 1.0, 1.0}};
  }
};

}  // namespace

TEST_CASE("frobenius distance") {
  CHECK(frobenius_distance(std::vector<double>{3, 0}, std::vector<double>{0, 4}) == 5.0);
  CHECK(frobenius_distance(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
  const std::vector<double> a = {0.3, -1, 2}, b = {1, 1, -1};
  CHECK(frobenius_distance(a, b) == frobenius_distance(b, a));
  CHECK_THROWS_AS(frobenius_distance(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("vacuous thresholds admit the first draws verbatim") {
  Fixture f;
  GenerativeOptions opt;
  opt.target = 5;
  opt.delta = 0.0;
  opt.epsilon = std::numeric_limits<double>::infinity();
  opt.seed = 9;
  const auto set = generate_solution_set(f.gmm, f.mdp, f.features, opt);
  CHECK(set.complete);
  CHECK(set.draws == 5);
  const auto draws = sample(f.gmm, 5, 9);
  CHECK(set.members == draws);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(set.evds[i] == doctest::Approx(evd_for_weights(draws[i], f.features, f.mdp)));
  }
}

TEST_CASE("admitted sets pass post-hoc verification") {
  Fixture f;
  GenerativeOptions opt;
  opt.target = 4;
  opt.delta = 1.0;
  opt.seed = 2;
  const auto all = generate_solution_set(f.gmm, f.mdp, f.features, {10, 0.0, 1e9, 0, 2, 1, {}});
  auto evds = all.evds;
  std::sort(evds.begin(), evds.end());
  opt.epsilon = evds[5];  // roughly half the draws qualify
  const auto set = generate_solution_set(f.gmm, f.mdp, f.features, opt);
  CHECK(set.members.size() >= 2);
  CHECK(verify(set, f.mdp, f.features).empty());
  for (double e : set.evds) CHECK(e < opt.epsilon);

  auto broken = set;
  broken.members.push_back(broken.members.front());
  broken.evds.push_back(broken.evds.front());
  CHECK_FALSE(verify(broken, f.mdp, f.features).empty());
}

TEST_CASE("impossible thresholds return a flagged partial set") {
  Fixture f;
  GenerativeOptions opt;
  opt.target = 3;
  opt.epsilon = 1e-12;
  opt.max_draws = 40;
  const auto set = generate_solution_set(f.gmm, f.mdp, f.features, opt);
  CHECK_FALSE(set.complete);
  CHECK(set.draws == 40);
  CHECK(set.members.size() < 3);
}

TEST_CASE("raising epsilon never admits fewer at delta = 0") {
  Fixture f;
  std::size_t previous = 0;
  for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0, 1e9}) {
    GenerativeOptions opt;
    opt.target = 60;
    opt.delta = 0.0;
    opt.epsilon = eps;
    opt.max_draws = 60;
    opt.seed = 5;
    const auto n = generate_solution_set(f.gmm, f.mdp, f.features, opt).members.size();
    CHECK(n >= previous);
    previous = n;
  }
  CHECK(previous == 60);
}

TEST_CASE("solution sets are deterministic and ignore thread count") {
  Fixture f;
  GenerativeOptions opt;
  opt.target = 3;
  opt.delta = 0.5;
  opt.epsilon = 5.0;
  opt.seed = 77;
  opt.threads = 1;
  const auto a = generate_solution_set(f.gmm, f.mdp, f.features, opt);
  opt.threads = 4;
  const auto b = generate_solution_set(f.gmm, f.mdp, f.features, opt);
  CHECK(a.members == b.members);
  CHECK(a.evds == b.evds);
  CHECK(a.draws == b.draws);
}

TEST_CASE("shape and parameter errors") {
  Fixture f;
  auto bad = f.gmm;
  bad.means = {{0.0}, {1.0}};
  bad.variances = {{1.0}, {1.0}};
  CHECK_THROWS_AS(generate_solution_set(bad, f.mdp, f.features, {}), ShapeError);
  GenerativeOptions opt;
  opt.target = 0;
  CHECK_THROWS_AS(generate_solution_set(f.gmm, f.mdp, f.features, opt), ConfigError);
}
