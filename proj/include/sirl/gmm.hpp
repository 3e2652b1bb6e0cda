#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sirl/random.hpp"

namespace sirl {

inline constexpr double kVarianceFloor = 1e-6;

using Point = std::vector<double>;

/// K-component Gaussian mixture with diagonal covariances.
struct Gmm {
  std::vector<double> mixing;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;

  std::size_t components() const { return mixing.size(); }
  std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }

  /// sum_k alpha_k mu_k
  std::vector<double> mean() const;

  /// Throws ConfigError unless mixing is a distribution (1e-9), shapes agree,
  /// and every variance is >= kVarianceFloor.
  void validate() const;

  friend bool operator==(const Gmm&, const Gmm&) = default;
};

/// Row-major N x K posterior component probabilities.
struct Responsibilities {
  std::size_t n_points = 0;
  std::size_t n_components = 0;
  std::vector<double> values;
  double log_likelihood = 0.0;  // sum_i log p(x_i) under the evaluated mixture

  double operator()(std::size_t i, std::size_t k) const { return values[i * n_components + k]; }
};

double log_normal_diag(std::span<const double> x, std::span<const double> mean,
                       std::span<const double> variance);

double log_pdf(const Gmm& gmm, std::span<const double> point);

/// Log-domain responsibilities. Throws NumericalError for a point with no
/// finite component density.
Responsibilities e_step(const Gmm& gmm, std::span<const Point> points);

struct MStepReport {
  std::vector<std::size_t> reseeded;
};

/// Weighted means, mixing and diagonal variances (floored). A component with
/// total responsibility below 1e-12 is re-seeded at a random data point with
/// the global data variance; `rng` is required only for that case.
Gmm m_step(std::span<const Point> points, const Responsibilities& resp, Rng* rng = nullptr,
           MStepReport* report = nullptr);

/// Means at K distinct data points drawn by greedy k-means++ seeding,
/// variances at the global data variance, uniform mixing.
Gmm cold_start(std::span<const Point> points, std::size_t k, Rng& rng);

/// Per-coordinate population variance, floored.
std::vector<double> data_variance(std::span<const Point> points);

struct FitResult {
  Gmm gmm;
  double log_likelihood = 0.0;
  std::vector<double> history;  // log-likelihood of the initial and every updated mixture
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<std::size_t> reseeded;  // component index per re-seed event
};

struct FitOptions {
  std::size_t max_iterations = 1000;
  double tol = 1e-8;
};

/// EM from `init` (or a seeded cold start when absent) until the total
/// log-likelihood improves by less than tol.
FitResult fit(std::span<const Point> points, std::size_t k, const std::optional<Gmm>& init,
              std::uint64_t seed, const FitOptions& options = {});

std::vector<Point> sample(const Gmm& gmm, std::size_t n, Rng& rng);
std::vector<Point> sample(const Gmm& gmm, std::size_t n, std::uint64_t seed);

/// Components ordered by first mean coordinate (stable on ties).
Gmm canonical(const Gmm& gmm);

/// mixing ++ means ++ variances, in component order.
std::vector<double> flatten(const Gmm& gmm);

/// Text form: "gmm K d" then per component "alpha; mu,...; var,...".
void write_gmm(std::ostream& out, const Gmm& gmm);
Gmm read_gmm(std::istream& in);

}  // namespace sirl
