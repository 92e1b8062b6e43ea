#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ruelle/ifs.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle::cli {

struct FamilySection {
  std::string kind = "affine_geometric";  // affine_geometric | gauss_digits | gauss_infinite | explicit_affine | power_law
  Interval domain{0.0, 1.0};
  double margin = 0.0;
  double ratio = 0.25;   // affine_geometric: q
  double offset = 0.5;   // affine_geometric: p
  std::vector<std::uint32_t> digits;   // gauss_digits
  std::uint32_t min_digit = 1;         // gauss_infinite
  std::vector<AffineCoeffs> maps;      // explicit_affine
  double scale = 0.5;                  // power_law
  double exponent = 2.0;               // power_law
};

struct NumericsSection {
  std::size_t grid = 512;
  std::size_t truncate = 64;
  std::size_t depth = 12;
  std::size_t min_depth = 1;
  double tol = 1e-8;        // dimension bracket width
  double rho_tol = 1e-10;
  double h_tol = 1e-8;
  double mu_tol = 1e-8;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  TailModel tail_model = TailModel::none;
  double theta_offset = 1e-3;
  double s_max = 64.0;
  std::size_t word_budget = 4'000'000;
};

struct EigenSection {
  double s = 1.0;
};

struct PressureSection {
  double s_min = 0.1;
  double s_max = 1.0;
  std::size_t steps = 10;
  std::vector<double> s;  // explicit values override the range
};

struct OscSection {
  std::size_t n = 8;
  std::vector<Interval> candidate;  // empty: interior of X
  bool suggest = false;
  std::size_t word_length = 60;     // for fixed-point witnesses
  std::size_t samples = 1000;       // chaos-game witnesses
};

struct AttractorSection {
  std::size_t count = 10'000;
  std::size_t word_length = 40;
  std::vector<double> scales;       // empty: dyadic scales of diam X
  std::optional<double> weights_exponent;
  std::size_t cover_depth = 4;
};

struct RunConfig {
  std::string name;
  std::filesystem::path source;
  FamilySection family;
  NumericsSection numerics;
  EigenSection eigen;
  PressureSection pressure;
  OscSection osc;
  AttractorSection attractor;
};

/// Strict parse; throws Error(config) naming the line and key on any unknown key or bad value.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::filesystem::path& path);

/// A bundled name ("cantor3") or a file path.
std::filesystem::path resolve_config(const std::string& name_or_path);
std::vector<std::string> bundled_configs();

/// Throws Error(config) when a numeric constraint is violated.
void validate(const RunConfig& cfg);

IFSFamily build_family(const RunConfig& cfg);

/// Parses "0.25", "1/4", "-3/8".
double parse_real(const std::string& text);

}  // namespace ruelle::cli
