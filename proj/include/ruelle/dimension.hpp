#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruelle/ifs.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

struct PressureOptions {
  std::size_t grid = 512;
  double rho_tol = 1e-10;
  std::size_t max_iter = 10000;
  /// Also estimate log rho(T_s) by power iteration on the grid.
  bool with_power_iteration = true;
  TailModel tail_model = TailModel::none;
  unsigned workers = 0;
  /// Maximum number of enumerated words per cylinder sum.
  std::size_t word_budget = 4'000'000;
  /// Words whose whole subtree contributes less than prune_tol / N^n are dropped
  /// and their mass bound is added to the upper sum.
  double prune_tol = 1e-12;
};

/// Cylinder sums at depth n: sum r_w^s over enumerated words, and an upper bound
/// on sum R_w^s over all words including omitted symbols and pruned subtrees.
struct CylinderSums {
  double lower_sum = 0.0;
  double upper_sum = 0.0;
  double dropped_mass = 0.0;  // share of upper_sum from pruning, budget and the j > N tail
  std::size_t words = 0;
  bool partial = false;       // word budget exhausted
  bool exact = false;         // closed-form factorization for affine maps
};

CylinderSums cylinder_sums(const IFSFamily& family, double s, std::size_t depth, std::size_t truncation,
                           const PressureOptions& options = {});

struct PressurePoint {
  double s = 0.0;
  double log_rho = 0.0;  // NaN when the power iteration was not requested
  double lower = 0.0;    // (1/n) log sum_{|w|=n} r_w^s
  double upper = 0.0;    // (1/n) log (sum_{|w|=n} R_w^s + tail corrections)
  std::size_t depth = 0;
  std::size_t truncation = 0;
  bool partial = false;
  bool exact = false;
  std::size_t words = 0;
  Interval rho_bracket{0.0, 0.0};
};

/// theta = inf { t : sum_j R_j^t < inf }. Throws theta_unknown for unclassified tails.
double finiteness_exponent(const IFSFamily& family);

/// Throws summability for s <= theta.
PressurePoint pressure(const IFSFamily& family, double s, std::size_t depth, std::size_t truncation,
                       const PressureOptions& options = {});

struct DimensionOptions {
  PressureOptions pressure;
  double tol = 1e-8;
  double theta_offset = 1e-3;
  double s_max = 64.0;
  std::size_t min_depth = 1;
  /// Used as theta when the family's tail is unclassified.
  std::optional<double> theta_lower_bound;
};

struct DimensionResult {
  double a = 0.0;                // point estimate (root of the power-iteration pressure)
  double a_lo = 0.0;             // certified: pressure lower bound > 0 here
  double a_hi = 0.0;             // certified: pressure upper bound < 0 here
  double theta = 0.0;
  bool psi_at_theta_diverges = false;
  double psi_low = 0.0;          // psi(theta + offset)
  double psi_high = 0.0;         // psi(s_max) upper bound
  std::size_t truncation = 0;
  std::size_t depth = 0;
  std::size_t iterations = 0;    // bisection steps
  bool certified = false;        // a_hi - a_lo <= tol with rigorous signs
  bool budget_exhausted = false; // depth limit reached with the bracket still straddling 0
  PressurePoint at_lo;
  PressurePoint at_hi;
};

/// Unique root a > theta of rho(T_a) = 1 by bisection on rigorous pressure signs.
/// Throws NoRootError when psi(theta+) <= 1 or psi(s_max) >= 1.
DimensionResult hausdorff_dimension(const IFSFamily& family, std::size_t depth, std::size_t truncation,
                                    const DimensionOptions& options = {});

struct MoranResult {
  double s = 0.0;
  bool degenerate = false;  // single ratio: singleton attractor
};

/// Unique s >= 0 with sum r_j^s = 1, by bisection.
MoranResult moran_root(std::span<const double> ratios);

struct ConvexityReport {
  std::vector<double> s;
  std::vector<double> f;         // (1/n) log sum r_w^s
  std::vector<double> pressure;  // power-iteration log rho (f when not requested)
  bool convex = true;
  bool strictly_decreasing = true;
  std::vector<std::string> defects;
};

/// s_grid must be ascending with at least 3 points above theta.
ConvexityReport convexity_check(const IFSFamily& family, std::span<const double> s_grid, std::size_t depth,
                                std::size_t truncation, const PressureOptions& options = {});

/// Rows "s,lower,log_rho,upper"; entries absent from `points` (s <= theta) print as divergent.
void write_pressure_csv(std::span<const std::optional<PressurePoint>> points, std::span<const double> s_values,
                        std::ostream& os);

}  // namespace ruelle
