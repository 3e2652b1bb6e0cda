#include "sirl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sirl/error.hpp"

namespace sirl::io {

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return {buf, end};
}

double parse_double(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  double x = 0.0;
  const auto [end, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || end != last || first == last) throw ConfigError("malformed number '" + text + "'");
  return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace {

template <class T, class Fmt>
void grid(std::ostream& out, std::span<const T> values, std::size_t n, Fmt fmt) {
  if (values.size() != n * n) throw ShapeError("grid needs grid_size^2 values");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out << (c ? "," : "") << fmt(values[r * n + c]);
    out << '\n';
  }
}

void row(std::ostream& out, std::span<const double> values) {
  for (std::size_t j = 0; j < values.size(); ++j) out << (j ? "," : "") << format_double(values[j]);
  out << '\n';
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  for (const auto& item : split(line)) out.push_back(parse_double(item));
  return out;
}

std::size_t parse_index(const std::string& text) {
  std::size_t x = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw ConfigError("malformed index '" + text + "'");
  }
  return x;
}

}  // namespace

void write_grid(std::ostream& out, std::span<const double> values, std::size_t grid_size) {
  grid(out, values, grid_size, format_double);
}

void write_grid(std::ostream& out, std::span<const std::size_t> values, std::size_t grid_size) {
  grid(out, values, grid_size, [](std::size_t x) { return std::to_string(x); });
}

std::vector<double> read_grid(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t width = 0, rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto r = parse_row(line);
    if (rows == 0) width = r.size();
    if (r.size() != width) throw ShapeError("ragged grid");
    out.insert(out.end(), r.begin(), r.end());
    ++rows;
  }
  if (rows != width) throw ShapeError("grid is not square");
  return out;
}

void write_weights(std::ostream& out, std::span<const double> w) { row(out, w); }

WeightVector read_weights(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return parse_row(line);
  }
  throw ConfigError("weight file is empty");
}

void write_features(std::ostream& out, const FeatureMatrix& features) {
  for (std::size_t s = 0; s < features.rows(); ++s) row(out, features.row(s));
}

void write_trace(std::ostream& out, const AscentTrace& trace) {
  out << "step,log_likelihood\n";
  for (std::size_t k = 0; k < trace.log_likelihoods.size(); ++k) {
    out << k << ',' << format_double(trace.log_likelihoods[k]) << '\n';
  }
  out << trace.log_likelihoods.size() << ',' << format_double(trace.final_log_likelihood) << '\n';
}

void write_iteration_log(std::ostream& out, std::span<const IterationRecord> log) {
  out << "t,N_t,theta2_rel_change,mean_ll_gain,seconds\n";
  for (const auto& r : log) {
    out << r.t << ',' << r.n_t << ',' << format_double(r.theta2_rel_change) << ','
        << format_double(r.mean_ll_gain) << ',' << format_double(r.seconds) << '\n';
  }
}

void write_demos(std::ostream& out, const DemoSet& demos) {
  out << "trajectory,step,state,action\n";
  for (std::size_t i = 0; i < demos.trajectories.size(); ++i) {
    const auto& traj = demos.trajectories[i];
    for (std::size_t k = 0; k < traj.size(); ++k) {
      out << i << ',' << k << ',' << traj[k].state << ',' << traj[k].action << '\n';
    }
  }
}

DemoSet read_demos(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "trajectory,step,state,action") {
    throw ConfigError("demo file lacks its header");
  }
  DemoSet demos;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) throw ConfigError("demo row needs 4 fields: '" + line + "'");
    const auto i = parse_index(f[0]), k = parse_index(f[1]);
    if (i == demos.trajectories.size()) demos.trajectories.emplace_back();
    if (i + 1 != demos.trajectories.size() || k != demos.trajectories.back().size()) {
      throw ConfigError("demo rows out of order at '" + line + "'");
    }
    demos.trajectories.back().push_back({parse_index(f[2]), parse_index(f[3])});
  }
  return demos;
}

void write_solution_set(std::ostream& out, const SolutionSet& set) {
  out << "# complete=" << (set.complete ? "true" : "false") << ",draws=" << set.draws
      << ",delta=" << format_double(set.delta) << ",epsilon=" << format_double(set.epsilon) << '\n';
  const auto dim = set.members.empty() ? 0 : set.members.front().size();
  out << "member";
  for (std::size_t j = 0; j < dim; ++j) out << ",w" << j;
  out << ",evd\n";
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    out << i;
    for (double x : set.members[i]) out << ',' << format_double(x);
    out << ',' << format_double(set.evds[i]) << '\n';
  }
}

SolutionSet read_solution_set(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ConfigError("solution set lacks its header");
  SolutionSet set;
  for (const auto& kv : split(line.substr(2))) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed header field '" + kv + "'");
    const auto key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "complete") set.complete = value == "true";
    else if (key == "draws") set.draws = parse_index(value);
    else if (key == "delta") set.delta = parse_double(value);
    else if (key == "epsilon") set.epsilon = parse_double(value);
    else throw ConfigError("unknown header field '" + key + "'");
  }
  if (!std::getline(in, line) || line.rfind("member", 0) != 0) throw ConfigError("solution set lacks column names");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = parse_row(line);
    if (f.size() < 2) throw ConfigError("solution row too short");
    set.evds.push_back(f.back());
    set.members.emplace_back(f.begin() + 1, f.end() - 1);
  }
  return set;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

}  // namespace sirl::io
