#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sirl/demos.hpp"
#include "sirl/features.hpp"
#include "sirl/maxent.hpp"
#include "sirl/mcem.hpp"
#include "sirl/robustness.hpp"

namespace sirl::io {

/// Shortest text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

std::vector<std::string> split(const std::string& line, char sep = ',');

/// grid_size x grid_size CSV; row r holds states r * N .. r * N + N - 1.
void write_grid(std::ostream& out, std::span<const double> values, std::size_t grid_size);
void write_grid(std::ostream& out, std::span<const std::size_t> values, std::size_t grid_size);
std::vector<double> read_grid(std::istream& in);

/// Single CSV line.
void write_weights(std::ostream& out, std::span<const double> w);
WeightVector read_weights(std::istream& in);

void write_features(std::ostream& out, const FeatureMatrix& features);
void write_trace(std::ostream& out, const AscentTrace& trace);
void write_iteration_log(std::ostream& out, std::span<const IterationRecord> log);

/// "trajectory,step,state,action" rows.
void write_demos(std::ostream& out, const DemoSet& demos);
DemoSet read_demos(std::istream& in);

/// First line "# complete=..,draws=..,delta=..,epsilon=..", then
/// "member,w0..w{d-1},evd" rows.
void write_solution_set(std::ostream& out, const SolutionSet& set);
SolutionSet read_solution_set(std::istream& in);

/// Opens for writing, creating parent directories; throws std::runtime_error
/// naming the path on failure.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace sirl::io
