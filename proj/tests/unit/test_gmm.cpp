#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sirl/error.hpp"
#include "sirl/gmm.hpp"

using namespace sirl;

namespace {

Gmm scalar(std::vector<double> alpha, std::vector<double> mu, std::vector<double> var) {
  Gmm g;
  g.mixing = std::move(alpha);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    g.means.push_back({mu[k]});
    g.variances.push_back({var[k]});
  }
  return g;
}

double normal_pdf(double x, double mu, double var) {
  return std::exp(-(x - mu) * (x - mu) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

}  // namespace

TEST_CASE("validate enforces the mixture invariants") {
  CHECK_NOTHROW(scalar({0.5, 0.5}, {0, 1}, {1, 1}).validate());
  CHECK_THROWS_AS(scalar({0.5, 0.6}, {0, 1}, {1, 1}).validate(), ConfigError);
  CHECK_THROWS_AS(scalar({1.0}, {0}, {1e-9}).validate(), ConfigError);
  CHECK_THROWS_AS(scalar({1.2, -0.2}, {0, 1}, {1, 1}).validate(), ConfigError);
}

TEST_CASE("standard normal log density at zero") {
  CHECK(log_pdf(scalar({1.0}, {0}, {1}), std::vector<double>{0.0}) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));
  CHECK(log_pdf(scalar({1.0}, {0}, {1}), std::vector<double>{0.0}) == doctest::Approx(-0.9189).epsilon(1e-4));
}

TEST_CASE("mixture log density bounds and symmetry") {
  const auto g = scalar({0.5, 0.5}, {-2, 2}, {1, 1});
  for (double x : {-3.0, -0.7, 0.0, 1.3, 4.0}) {
    const std::vector<double> p = {x}, q = {-x};
    CHECK(log_pdf(g, p) == doctest::Approx(log_pdf(g, q)));
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(log_pdf(g, p) >= std::log(g.mixing[k]) + log_normal_diag(p, g.means[k], g.variances[k]));
    }
  }
}

TEST_CASE("e_step: single component gets everything") {
  const std::vector<Point> pts = {{-4.0}, {0.0}, {9.0}};
  const auto r = e_step(scalar({1.0}, {0}, {1}), pts);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r(i, 0) == 1.0);
}

TEST_CASE("e_step: equidistant point splits evenly") {
  const std::vector<Point> pts = {{0.0}};
  const auto r = e_step(scalar({0.5, 0.5}, {-1, 1}, {2, 2}), pts);
  CHECK(r(0, 0) == doctest::Approx(0.5));
  CHECK(r(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("e_step matches the scalar density oracle") {
  const std::vector<Point> pts = {{1.0}, {3.5}, {-2.0}};
  const auto g = scalar({0.5, 0.5}, {0, 4}, {1, 1});
  const auto r = e_step(g, pts);
  for (std::size_t i = 0; i < 3; ++i) {
    const double a = 0.5 * normal_pdf(pts[i][0], 0, 1), b = 0.5 * normal_pdf(pts[i][0], 4, 1);
    CHECK(r(i, 0) == doctest::Approx(a / (a + b)).epsilon(1e-12));
    CHECK(r(i, 0) + r(i, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  double ll = 0.0;
  for (const auto& p : pts) ll += std::log(0.5 * normal_pdf(p[0], 0, 1) + 0.5 * normal_pdf(p[0], 4, 1));
  CHECK(r.log_likelihood == doctest::Approx(ll).epsilon(1e-12));
}

TEST_CASE("e_step survives far-away points in the log domain") {
  const std::vector<Point> pts = {{1e4}};
  const auto r = e_step(scalar({0.5, 0.5}, {0, 1}, {1, 1}), pts);
  CHECK(r(0, 1) == doctest::Approx(1.0));
  CHECK(std::isfinite(r.log_likelihood));
}

TEST_CASE("m_step: one component reproduces mean and population variance") {
  const std::vector<Point> pts = {{-1.0}, {1.0}};
  Responsibilities r{2, 1, {1.0, 1.0}, 0.0};
  const auto g = m_step(pts, r);
  CHECK(g.mixing[0] == 1.0);
  CHECK(g.means[0][0] == doctest::Approx(0.0));
  CHECK(g.variances[0][0] == doctest::Approx(1.0));
}

TEST_CASE("m_step: weighted points against a scalar-loop oracle") {
  const std::vector<Point> pts = {{0.0, 1.0}, {2.0, -1.0}, {5.0, 3.0}};
  const std::vector<double> resp = {0.9, 0.1, 0.3, 0.7, 0.2, 0.8};
  Responsibilities r{3, 2, resp, 0.0};
  const auto g = m_step(pts, r);
  for (std::size_t k = 0; k < 2; ++k) {
    double nk = 0.0;
    for (std::size_t i = 0; i < 3; ++i) nk += resp[i * 2 + k];
    CHECK(g.mixing[k] == doctest::Approx(nk / 3));
    for (std::size_t d = 0; d < 2; ++d) {
      double mu = 0.0;
      for (std::size_t i = 0; i < 3; ++i) mu += resp[i * 2 + k] * pts[i][d];
      mu /= nk;
      double var = 0.0;
      for (std::size_t i = 0; i < 3; ++i) var += resp[i * 2 + k] * (pts[i][d] - mu) * (pts[i][d] - mu);
      var /= nk;
      CHECK(g.means[k][d] == doctest::Approx(mu));
      CHECK(g.variances[k][d] == doctest::Approx(var));
    }
  }
}

TEST_CASE("m_step floors variances of duplicated points") {
  const std::vector<Point> pts = {{2.0}, {2.0}, {2.0}};
  Responsibilities r{3, 1, {1.0, 1.0, 1.0}, 0.0};
  CHECK(m_step(pts, r).variances[0][0] == kVarianceFloor);
}

TEST_CASE("m_step re-seeds an empty component") {
  const std::vector<Point> pts = {{0.0}, {1.0}, {2.0}, {3.0}};
  Responsibilities r{4, 2, {1, 0, 1, 0, 1, 0, 1, 0}, 0.0};
  Rng rng(3);
  MStepReport report;
  const auto g = m_step(pts, r, &rng, &report);
  REQUIRE(report.reseeded.size() == 1);
  CHECK(report.reseeded[0] == 1);
  const double mu = g.means[1][0];
  CHECK((mu == 0.0 || mu == 1.0 || mu == 2.0 || mu == 3.0));
  CHECK(g.variances[1][0] == doctest::Approx(1.25));
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS(m_step(pts, r));
}

TEST_CASE("K = 1 fit is closed form after one iteration") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(3.0, 2.0);
  std::vector<Point> pts(200);
  for (auto& p : pts) p = {n(rng), n(rng)};
  const auto r = fit(pts, 1, std::nullopt, 5);
  for (std::size_t d = 0; d < 2; ++d) {
    double mu = 0.0, var = 0.0;
    for (const auto& p : pts) mu += p[d];
    mu /= 200;
    for (const auto& p : pts) var += (p[d] - mu) * (p[d] - mu);
    var /= 200;
    CHECK(r.gmm.means[0][d] == doctest::Approx(mu));
    CHECK(r.gmm.variances[0][d] == doctest::Approx(var));
  }
  CHECK(r.iterations <= 2);
  CHECK(r.converged);
}

TEST_CASE("fit separates two well-separated clusters") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> a(-10.0, 1.0), b(10.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 250; ++i) pts.push_back({a(rng)});
  for (int i = 0; i < 250; ++i) pts.push_back({b(rng)});
  const auto r = fit(pts, 2, std::nullopt, 11);
  const auto c = canonical(r.gmm);
  CHECK(std::abs(c.means[0][0] + 10.0) < 0.5);
  CHECK(std::abs(c.means[1][0] - 10.0) < 0.5);
  CHECK(std::abs(c.mixing[0] - 0.5) < 0.1);
  for (std::size_t t = 1; t < r.history.size(); ++t) CHECK(r.history[t] >= r.history[t - 1] - 1e-8);
}

TEST_CASE("fit warm-started from a given mixture") {
  std::vector<Point> pts = {{0.0}, {0.1}, {5.0}, {5.2}};
  const auto init = scalar({0.5, 0.5}, {0, 5}, {1, 1});
  const auto r = fit(pts, 2, init, 0);
  CHECK(r.gmm.means[0][0] == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(r.gmm.means[1][0] == doctest::Approx(5.1).epsilon(1e-6));
  CHECK_THROWS_AS(fit(pts, 5, std::nullopt, 0), ConfigError);
}

TEST_CASE("cold start picks distinct data points") {
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({static_cast<double>(i)});
  Rng rng(4);
  const auto g = cold_start(pts, 3, rng);
  CHECK(g.means[0] != g.means[1]);
  CHECK(g.means[1] != g.means[2]);
  CHECK(g.means[0] != g.means[2]);
  CHECK(g.variances[0][0] == doctest::Approx(8.25));
}

TEST_CASE("sampling: law of large numbers and component frequencies") {
  Gmm g;
  g.mixing = {0.2, 0.5, 0.3};
  g.means = {{-100.0, 1.0}, {0.0, 2.0}, {100.0, -3.0}};
  g.variances = {{1.0, 0.5}, {4.0, 1.0}, {2.0, 2.0}};
  const std::size_t n = 100000;
  const auto s = sample(g, n, 7);
  CHECK(s == sample(g, n, 7));
  std::vector<double> counts(3, 0.0);
  std::vector<double> mean(2, 0.0);
  for (const auto& p : s) {
    ++counts[p[0] < -50 ? 0 : (p[0] > 50 ? 2 : 1)];
    mean[0] += p[0] / n;
    mean[1] += p[1] / n;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const double sd = std::sqrt(g.mixing[k] * (1 - g.mixing[k]) / n);
    CHECK(std::abs(counts[k] / n - g.mixing[k]) <= 3 * sd);
  }
  const auto mu = g.mean();
  for (std::size_t d = 0; d < 2; ++d) {
    // mixture variance = E[var] + Var[mean]
    double ev = 0.0, em2 = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      ev += g.mixing[k] * g.variances[k][d];
      em2 += g.mixing[k] * g.means[k][d] * g.means[k][d];
    }
    const double sd = std::sqrt(ev + em2 - mu[d] * mu[d]);
    CHECK(std::abs(mean[d] - mu[d]) <= 3 * sd / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("floor-variance component samples sit on its mean") {
  const auto g = scalar({1.0}, {4.0}, {kVarianceFloor});
  for (const auto& p : sample(g, 1000, 1)) CHECK(std::abs(p[0] - 4.0) < 0.01);
}

TEST_CASE("canonical order and flatten") {
  const auto g = scalar({0.3, 0.7}, {2.0, -1.0}, {1.0, 3.0});
  const auto c = canonical(g);
  CHECK(c.means[0][0] == -1.0);
  CHECK(c.mixing[0] == 0.7);
  CHECK(flatten(c) == std::vector<double>{0.7, 0.3, -1.0, 2.0, 3.0, 1.0});
}

TEST_CASE("gmm text round-trips exactly") {
  Gmm g;
  g.mixing = {0.1, 0.9};
  g.means = {{1.0 / 3, -2e-7}, {123456.789, 0.0}};
  g.variances = {{1e-6, 0.1}, {2.0, 7.0 / 11}};
  std::stringstream ss;
  write_gmm(ss, g);
  CHECK(read_gmm(ss) == g);
  std::stringstream bad("gmm 2 1\n1; 0; 1\n");
  CHECK_THROWS_AS(read_gmm(bad), ConfigError);
}
