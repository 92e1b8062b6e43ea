#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ruelle/cli/config.hpp"

namespace ruelle::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2 };

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> truncate;
  std::optional<std::size_t> depth;
  std::optional<double> tol;
  std::optional<unsigned> workers;
  std::optional<double> eigen_s;
  std::optional<double> s_min;
  std::optional<double> s_max;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> osc_n;
  std::vector<Interval> candidate;
  bool suggest = false;
  std::optional<std::size_t> count;
  std::optional<std::size_t> word_length;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

struct Outputs {
  std::optional<std::filesystem::path> trace;     // per-iteration CSV of the eigen run
  std::optional<std::filesystem::path> plot_dir;  // two-column data files
};

int cmd_dim(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err);
int cmd_eigen(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err);
int cmd_pressure(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err);
int cmd_osc(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err);
int cmd_attractor(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err);

/// Pressure sample points: the explicit list, or `steps` evenly spaced values from s_min to s_max.
std::vector<double> pressure_grid(const PressureSection& p);

}  // namespace ruelle::cli
