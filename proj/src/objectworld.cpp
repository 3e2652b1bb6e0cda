#include "sirl/objectworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sirl/error.hpp"
#include "sirl/random.hpp"

namespace sirl::objectworld {

namespace {

std::size_t manhattan(const Instance& w, std::size_t a, std::size_t b) {
  const auto dr = static_cast<long>(w.row(a)) - static_cast<long>(w.row(b));
  const auto dc = static_cast<long>(w.col(a)) - static_cast<long>(w.col(b));
  return static_cast<std::size_t>(std::labs(dr) + std::labs(dc));
}

double euclidean(const Instance& w, std::size_t a, std::size_t b) {
  const double dr = static_cast<double>(w.row(a)) - static_cast<double>(w.row(b));
  const double dc = static_cast<double>(w.col(a)) - static_cast<double>(w.col(b));
  return std::sqrt(dr * dr + dc * dc);
}

std::size_t sample_successor(const Transitions& t, std::size_t s, std::size_t a, Rng& rng) {
  const auto row = t.row(s, a);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (const auto& e : row) {
    acc += e.prob;
    if (u < acc) return e.next;
  }
  return row.back().next;
}

}  // namespace

void validate(const Instance& w) {
  if (w.grid_size == 0) throw ConfigError("grid_size must be positive");
  if (w.n_colors < 2) throw ConfigError("objectworld needs at least two colours");
  if (!(w.wind >= 0.0 && w.wind <= 1.0)) throw ConfigError("wind must lie in [0, 1]");
  if (!(w.discount >= 0.0 && w.discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
  std::vector<bool> used(w.n_states(), false);
  for (const auto& o : w.objects) {
    if (o.cell >= w.n_states()) throw ConfigError("object cell outside the grid");
    if (used[o.cell]) throw ConfigError("two objects share cell " + std::to_string(o.cell));
    used[o.cell] = true;
    if (o.inner_color >= w.n_colors || o.outer_color >= w.n_colors) throw ConfigError("object colour out of range");
  }
}

Instance generate(std::size_t grid_size, std::size_t n_objects, std::size_t n_colors, double wind,
                  double discount, std::uint64_t seed) {
  Instance w;
  w.grid_size = grid_size;
  w.n_colors = n_colors;
  w.wind = wind;
  w.discount = discount;
  w.seed = seed;
  validate(w);
  if (n_objects > w.n_states()) throw ConfigError("more objects than grid cells");

  Rng rng(seed);
  std::vector<std::size_t> cells(w.n_states());
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  std::uniform_int_distribution<std::size_t> color(0, n_colors - 1);
  for (std::size_t i = 0; i < n_objects; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cells.size() - 1);
    std::swap(cells[i], cells[pick(rng)]);
    const auto inner = color(rng);
    const auto outer = color(rng);
    w.objects.push_back({cells[i], inner, outer});
  }
  return w;
}

std::size_t move(const Instance& w, std::size_t cell, std::size_t action) {
  const auto r = w.row(cell);
  const auto c = w.col(cell);
  const auto n = w.grid_size;
  switch (static_cast<Action>(action)) {
    case Action::kUp: return r > 0 ? cell - n : cell;
    case Action::kDown: return r + 1 < n ? cell + n : cell;
    case Action::kLeft: return c > 0 ? cell - 1 : cell;
    case Action::kRight: return c + 1 < n ? cell + 1 : cell;
    case Action::kStay: return cell;
  }
  throw ConfigError("unknown action " + std::to_string(action));
}

std::shared_ptr<const Transitions> transition_model(const Instance& w) {
  validate(w);
  const double random_share = w.wind / static_cast<double>(kNumActions);
  std::vector<std::vector<Transitions::Entry>> rows(w.n_states() * kNumActions);
  for (std::size_t s = 0; s < w.n_states(); ++s) {
    for (std::size_t a = 0; a < kNumActions; ++a) {
      auto& row = rows[s * kNumActions + a];
      row.push_back({move(w, s, a), 1.0 - w.wind});
      for (std::size_t b = 0; b < kNumActions; ++b) row.push_back({move(w, s, b), random_share});
    }
  }
  return std::make_shared<const Transitions>(w.n_states(), kNumActions, std::move(rows));
}

std::vector<double> true_reward(const Instance& w) {
  validate(w);
  std::vector<double> reward(w.n_states(), 0.0);
  for (std::size_t s = 0; s < w.n_states(); ++s) {
    bool near_red = false;
    bool near_blue = false;
    for (const auto& o : w.objects) {
      const auto d = manhattan(w, s, o.cell);
      if (o.outer_color == kRed && d <= 3) near_red = true;
      if (o.outer_color == kBlue && d <= 2) near_blue = true;
    }
    if (near_red && near_blue) {
      reward[s] = 1.0;
    } else if (near_red) {
      reward[s] = -1.0;
    }
  }
  return reward;
}

TabularMdp true_mdp(const Instance& w) {
  return TabularMdp(transition_model(w), true_reward(w), w.discount);
}

FeatureMatrix features_continuous(const Instance& w) {
  validate(w);
  const double sentinel = static_cast<double>(w.grid_size) * std::sqrt(2.0);
  FeatureMatrix f(w.n_states(), 2 * w.n_colors);
  for (std::size_t s = 0; s < w.n_states(); ++s) {
    for (std::size_t j = 0; j < f.cols(); ++j) f(s, j) = sentinel;
    for (const auto& o : w.objects) {
      const double d = euclidean(w, s, o.cell);
      f(s, 2 * o.inner_color) = std::min(f(s, 2 * o.inner_color), d);
      f(s, 2 * o.outer_color + 1) = std::min(f(s, 2 * o.outer_color + 1), d);
    }
  }
  return f;
}

FeatureMatrix features_discrete(const Instance& w) {
  const auto continuous = features_continuous(w);
  const auto n = w.grid_size;
  FeatureMatrix f(w.n_states(), continuous.cols() * n);
  for (std::size_t s = 0; s < w.n_states(); ++s) {
    for (std::size_t j = 0; j < continuous.cols(); ++j) {
      for (std::size_t d = 1; d <= n; ++d) {
        f(s, j * n + (d - 1)) = continuous(s, j) < static_cast<double>(d) ? 1.0 : 0.0;
      }
    }
  }
  return f;
}

FeatureMatrix features(const Instance& w, FeatureVariant variant) {
  return variant == FeatureVariant::kContinuous ? features_continuous(w) : features_discrete(w);
}

DemoSet rollout_demos(const TabularMdp& mdp, const Policy& policy, std::size_t n_demos,
                      std::size_t length, std::uint64_t seed) {
  if (length == 0) throw ConfigError("demonstration length must be positive");
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw ShapeError("policy shape does not match the MDP");
  }
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> start(0, mdp.n_states() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DemoSet demos;
  demos.trajectories.reserve(n_demos);
  for (std::size_t i = 0; i < n_demos; ++i) {
    Trajectory traj;
    traj.reserve(length);
    auto s = start(rng);
    for (std::size_t t = 0; t < length; ++t) {
      std::size_t a = 0;
      if (policy.is_deterministic()) {
        a = policy.action(s);
      } else {
        const double u = unit(rng);
        double acc = 0.0;
        a = mdp.n_actions() - 1;
        for (std::size_t b = 0; b < mdp.n_actions(); ++b) {
          acc += policy.prob(s, b);
          if (u < acc) {
            a = b;
            break;
          }
        }
      }
      traj.push_back({s, a});
      s = sample_successor(mdp.transitions(), s, a, rng);
    }
    demos.trajectories.push_back(std::move(traj));
  }
  return demos;
}

DemoSet generate_demos(const Instance& w, std::size_t n_demos, std::size_t length, std::uint64_t seed) {
  const auto mdp = true_mdp(w);
  const auto optimal = value_iteration(mdp);
  return rollout_demos(mdp, optimal.policy, n_demos, length, seed);
}

void write_instance(std::ostream& out, const Instance& w) {
  out << "objectworld grid_size=" << w.grid_size << " n_colors=" << w.n_colors
      << " wind=" << std::setprecision(17) << w.wind << " discount=" << w.discount
      << " seed=" << w.seed << " n_objects=" << w.objects.size() << '\n';
  for (const auto& o : w.objects) out << o.cell << ' ' << o.inner_color << ' ' << o.outer_color << '\n';
}

Instance read_instance(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty objectworld document");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "objectworld") throw ConfigError("not an objectworld document");

  Instance w;
  std::size_t n_objects = 0;
  bool seen[6] = {};
  std::string field;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed header field '" + field + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    try {
      if (key == "grid_size") { w.grid_size = std::stoull(value); seen[0] = true; }
      else if (key == "n_colors") { w.n_colors = std::stoull(value); seen[1] = true; }
      else if (key == "wind") { w.wind = std::stod(value); seen[2] = true; }
      else if (key == "discount") { w.discount = std::stod(value); seen[3] = true; }
      else if (key == "seed") { w.seed = std::stoull(value); seen[4] = true; }
      else if (key == "n_objects") { n_objects = std::stoull(value); seen[5] = true; }
      else throw ConfigError("unknown header field '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError("bad value for header field '" + key + "'");
    }
  }
  for (bool s : seen) {
    if (!s) throw ConfigError("objectworld header is missing a field");
  }
  for (std::size_t i = 0; i < n_objects; ++i) {
    Object o{};
    if (!(in >> o.cell >> o.inner_color >> o.outer_color)) throw ConfigError("truncated object list");
    w.objects.push_back(o);
  }
  validate(w);
  return w;
}

std::string to_string(FeatureVariant variant) {
  return variant == FeatureVariant::kContinuous ? "continuous" : "discrete";
}

FeatureVariant parse_feature_variant(const std::string& name) {
  if (name == "continuous") return FeatureVariant::kContinuous;
  if (name == "discrete") return FeatureVariant::kDiscrete;
  throw ConfigError("unknown feature variant '" + name + "'");
}

}  // namespace sirl::objectworld
