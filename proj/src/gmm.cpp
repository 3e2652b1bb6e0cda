#include "sirl/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "sirl/error.hpp"

namespace sirl {

namespace {

constexpr double kEmptyComponent = 1e-12;

void check_points(std::span<const Point> points, std::size_t dim) {
  for (const auto& p : points) {
    if (p.size() != dim) throw ShapeError("point dimension does not match the mixture");
  }
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + item + "' in gmm document");
    }
  }
  return out;
}

}  // namespace

std::vector<double> Gmm::mean() const {
  std::vector<double> out(dim(), 0.0);
  for (std::size_t k = 0; k < components(); ++k) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += mixing[k] * means[k][j];
  }
  return out;
}

void Gmm::validate() const {
  if (mixing.empty()) throw ConfigError("mixture needs at least one component");
  if (means.size() != mixing.size() || variances.size() != mixing.size()) throw ShapeError("mixture component counts disagree");
  double total = 0.0;
  for (double a : mixing) {
    if (!(a >= 0.0)) throw ConfigError("mixing weights must be non-negative");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixing weights must sum to 1");
  const auto d = dim();
  if (d == 0) throw ShapeError("mixture dimension must be positive");
  for (std::size_t k = 0; k < components(); ++k) {
    if (means[k].size() != d || variances[k].size() != d) throw ShapeError("mixture component dimensions disagree");
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(means[k][j])) throw ConfigError("mixture mean is not finite");
      if (!(variances[k][j] >= kVarianceFloor) || !std::isfinite(variances[k][j])) {
        throw ConfigError("mixture variance below the floor");
      }
    }
  }
}

double log_normal_diag(std::span<const double> x, std::span<const double> mean,
                       std::span<const double> variance) {
  constexpr double log_2pi = 1.8378770664093454835606594728112;  // log(2 pi)
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - mean[j];
    acc += log_2pi + std::log(variance[j]) + diff * diff / variance[j];
  }
  return -0.5 * acc;
}

double log_pdf(const Gmm& gmm, std::span<const double> point) {
  if (point.size() != gmm.dim()) throw ShapeError("point dimension does not match the mixture");
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(gmm.components());
  for (std::size_t k = 0; k < gmm.components(); ++k) {
    terms[k] = std::log(gmm.mixing[k]) + log_normal_diag(point, gmm.means[k], gmm.variances[k]);
    top = std::max(top, terms[k]);
  }
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

Responsibilities e_step(const Gmm& gmm, std::span<const Point> points) {
  check_points(points, gmm.dim());
  const auto K = gmm.components();
  Responsibilities r;
  r.n_points = points.size();
  r.n_components = K;
  r.values.assign(points.size() * K, 0.0);

  std::vector<double> log_mix(K), log_det(K);
  constexpr double log_2pi = 1.8378770664093454835606594728112;
  for (std::size_t k = 0; k < K; ++k) {
    log_mix[k] = std::log(gmm.mixing[k]);
    double ld = 0.0;
    for (double v : gmm.variances[k]) ld += log_2pi + std::log(v);
    log_det[k] = ld;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double* row = r.values.data() + i * K;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      double maha = 0.0;
      const auto& mu = gmm.means[k];
      const auto& var = gmm.variances[k];
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double diff = points[i][j] - mu[j];
        maha += diff * diff / var[j];
      }
      row[k] = log_mix[k] - 0.5 * (log_det[k] + maha);
      top = std::max(top, row[k]);
    }
    if (!std::isfinite(top)) {
      throw NumericalError("point " + std::to_string(i) + " has zero density under every component");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = std::exp(row[k] - top);
      sum += row[k];
    }
    for (std::size_t k = 0; k < K; ++k) row[k] /= sum;
    total += top + std::log(sum);
  }
  r.log_likelihood = total;
  return r;
}

std::vector<double> data_variance(std::span<const Point> points) {
  if (points.empty()) throw ConfigError("no data points");
  const auto d = points.front().size();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += p[j];
  }
  for (auto& m : mean) m /= static_cast<double>(points.size());
  for (const auto& p : points) {
    for (std::size_t j = 0; j < d; ++j) var[j] += (p[j] - mean[j]) * (p[j] - mean[j]);
  }
  for (auto& v : var) v = std::max(v / static_cast<double>(points.size()), kVarianceFloor);
  return var;
}

Gmm m_step(std::span<const Point> points, const Responsibilities& resp, Rng* rng, MStepReport* report) {
  if (resp.n_points != points.size()) throw ShapeError("responsibility rows must equal the point count");
  if (points.empty()) throw ConfigError("no data points");
  const auto K = resp.n_components;
  const auto d = points.front().size();
  check_points(points, d);
  const double n = static_cast<double>(points.size());

  Gmm out;
  out.mixing.assign(K, 0.0);
  out.means.assign(K, std::vector<double>(d, 0.0));
  out.variances.assign(K, std::vector<double>(d, 0.0));
  std::vector<double> global_var;

  for (std::size_t k = 0; k < K; ++k) {
    double weight = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) weight += resp(i, k);
    if (weight < kEmptyComponent) {
      if (rng == nullptr) throw NumericalError("component " + std::to_string(k) + " is empty and no re-seed source was given");
      if (global_var.empty()) global_var = data_variance(points);
      const auto pick = std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(*rng);
      out.means[k] = points[pick];
      out.variances[k] = global_var;
      out.mixing[k] = 1.0 / n;
      if (report) report->reseeded.push_back(k);
      continue;
    }
    auto& mu = out.means[k];
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double g = resp(i, k);
      for (std::size_t j = 0; j < d; ++j) mu[j] += g * points[i][j];
    }
    for (auto& x : mu) x /= weight;
    auto& var = out.variances[k];
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double g = resp(i, k);
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = points[i][j] - mu[j];
        var[j] += g * diff * diff;
      }
    }
    for (auto& v : var) v = std::max(v / weight, kVarianceFloor);
    out.mixing[k] = weight / n;
  }
  const double total = std::accumulate(out.mixing.begin(), out.mixing.end(), 0.0);
  for (auto& a : out.mixing) a /= total;
  return out;
}

Gmm cold_start(std::span<const Point> points, std::size_t k, Rng& rng) {
  if (k == 0) throw ConfigError("mixture needs at least one component");
  if (points.size() < k) throw ConfigError("need at least K points to initialise K components");
  const auto n = points.size();
  auto sq = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t d = 0; d < points[i].size(); ++d) acc += (points[i][d] - points[j][d]) * (points[i][d] - points[j][d]);
    return acc;
  };

  // Greedy k-means++: each further centre is the best of a few D^2-weighted
  // draws, judged by the resulting total squared distance.
  std::vector<std::size_t> chosen{std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)};
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = sq(i, chosen[0]);
  const auto trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (chosen.size() < k) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t best = n;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> best_nearest;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      std::size_t cand = n;
      if (total > 0.0) {
        const double target = unit(rng) * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < n && cand == n; ++i) {
          acc += nearest[i];
          if (nearest[i] > 0.0 && acc >= target) cand = i;
        }
        if (cand == n) {
          for (std::size_t i = n; i-- > 0;) {
            if (nearest[i] > 0.0) {
              cand = i;
              break;
            }
          }
        }
      } else {
        // every point sits on a centre; any unused index will do
        std::vector<std::size_t> unused;
        for (std::size_t i = 0; i < n; ++i) {
          if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) unused.push_back(i);
        }
        cand = unused[std::uniform_int_distribution<std::size_t>(0, unused.size() - 1)(rng)];
      }
      std::vector<double> updated(n);
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) cost += updated[i] = std::min(nearest[i], sq(i, cand));
      if (cost < best_cost) {
        best_cost = cost;
        best = cand;
        best_nearest = std::move(updated);
      }
    }
    chosen.push_back(best);
    nearest = std::move(best_nearest);
  }

  Gmm g;
  const auto var = data_variance(points);
  for (auto i : chosen) {
    g.means.push_back(points[i]);
    g.variances.push_back(var);
    g.mixing.push_back(1.0 / static_cast<double>(k));
  }
  return g;
}

FitResult fit(std::span<const Point> points, std::size_t k, const std::optional<Gmm>& init,
              std::uint64_t seed, const FitOptions& options) {
  if (points.size() < k) throw ConfigError("need at least K points to fit K components");
  Rng rng(seed);
  FitResult result;
  if (init) {
    if (init->components() != k) throw ConfigError("initial mixture has the wrong component count");
    init->validate();
    result.gmm = *init;
  } else {
    result.gmm = cold_start(points, k, rng);
  }
  check_points(points, result.gmm.dim());

  auto resp = e_step(result.gmm, points);
  result.log_likelihood = resp.log_likelihood;
  result.history.push_back(resp.log_likelihood);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    MStepReport report;
    auto next = m_step(points, resp, &rng, &report);
    auto next_resp = e_step(next, points);
    result.reseeded.insert(result.reseeded.end(), report.reseeded.begin(), report.reseeded.end());
    const double gain = next_resp.log_likelihood - result.log_likelihood;
    result.gmm = std::move(next);
    result.log_likelihood = next_resp.log_likelihood;
    result.history.push_back(next_resp.log_likelihood);
    resp = std::move(next_resp);
    ++result.iterations;
    if (gain < options.tol && report.reseeded.empty()) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::vector<Point> sample(const Gmm& gmm, std::size_t n, Rng& rng) {
  gmm.validate();
  std::discrete_distribution<std::size_t> pick(gmm.mixing.begin(), gmm.mixing.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = pick(rng);
    Point p(gmm.dim());
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = gmm.means[k][j] + std::sqrt(gmm.variances[k][j]) * normal(rng);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Point> sample(const Gmm& gmm, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample(gmm, n, rng);
}

Gmm canonical(const Gmm& gmm) {
  std::vector<std::size_t> order(gmm.components());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gmm.means[a][0] < gmm.means[b][0]; });
  Gmm out;
  for (auto k : order) {
    out.mixing.push_back(gmm.mixing[k]);
    out.means.push_back(gmm.means[k]);
    out.variances.push_back(gmm.variances[k]);
  }
  return out;
}

std::vector<double> flatten(const Gmm& gmm) {
  std::vector<double> out(gmm.mixing);
  for (const auto& m : gmm.means) out.insert(out.end(), m.begin(), m.end());
  for (const auto& v : gmm.variances) out.insert(out.end(), v.begin(), v.end());
  return out;
}

void write_gmm(std::ostream& out, const Gmm& gmm) {
  gmm.validate();
  out << "gmm " << gmm.components() << ' ' << gmm.dim() << '\n' << std::setprecision(17);
  auto write_row = [&](const std::vector<double>& v) {
    for (std::size_t j = 0; j < v.size(); ++j) out << (j ? "," : "") << v[j];
  };
  for (std::size_t k = 0; k < gmm.components(); ++k) {
    out << gmm.mixing[k] << "; ";
    write_row(gmm.means[k]);
    out << "; ";
    write_row(gmm.variances[k]);
    out << '\n';
  }
}

Gmm read_gmm(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty gmm document");
  std::istringstream header(line);
  std::string magic;
  std::size_t k = 0, d = 0;
  if (!(header >> magic >> k >> d) || magic != "gmm") throw ConfigError("gmm header must read 'gmm K d'");
  Gmm g;
  for (std::size_t c = 0; c < k; ++c) {
    if (!std::getline(in, line)) throw ConfigError("truncated gmm document");
    const auto a = line.find(';');
    const auto b = line.find(';', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw ConfigError("gmm component line needs 'alpha; mu; var'");
    const auto alpha = parse_csv_doubles(line.substr(0, a));
    if (alpha.size() != 1) throw ConfigError("gmm component needs one mixing weight");
    g.mixing.push_back(alpha[0]);
    g.means.push_back(parse_csv_doubles(line.substr(a + 1, b - a - 1)));
    g.variances.push_back(parse_csv_doubles(line.substr(b + 1)));
    if (g.means.back().size() != d || g.variances.back().size() != d) throw ShapeError("gmm component dimension disagrees with header");
  }
  g.validate();
  return g;
}

}  // namespace sirl
