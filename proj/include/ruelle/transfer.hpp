#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruelle/ifs.hpp"
#include "ruelle/interval.hpp"

namespace ruelle {

/// M equally spaced nodes over [lo, hi].
struct UniformGrid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t size = 2;

  /// Grid over `hull`; a degenerate hull is widened so the nodes stay strictly increasing.
  static UniformGrid over(const Interval& hull, std::size_t size);

  double spacing() const { return (hi - lo) / static_cast<double>(size - 1); }
  double node(std::size_t i) const;
  std::vector<double> nodes() const;
  /// Cell index k and local coordinate t in [0, 1] of x, clamped to the grid.
  std::pair<std::size_t, double> locate(double x) const;
};

/// Piecewise-linear function on a uniform grid; clamps outside the grid.
class GridFunction {
 public:
  GridFunction(UniformGrid grid, std::vector<double> values);
  static GridFunction constant(UniformGrid grid, double value);
  static GridFunction sample(UniformGrid grid, const std::function<double(double)>& f);

  const UniformGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double operator()(double x) const;
  double max_abs() const;
  double min() const;
  double max() const;
  /// max |f(x_{i+1}) - f(x_i)| / h
  double lipschitz() const;

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

struct Atom {
  double position = 0.0;
  double mass = 0.0;
};

class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);
  /// `count` equal atoms at the cell midpoints of `hull`, total mass 1.
  static AtomicMeasure uniform(const Interval& hull, std::size_t count);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  AtomicMeasure normalized() const;
  double integrate(const std::function<double(double)>& f) const;
  double integrate(const GridFunction& f) const;

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

/// Mass-preserving aggregation onto the grid: each atom splits between its two
/// neighbouring nodes in the linear-interpolation proportions.
std::vector<double> bin_to_grid(const AtomicMeasure& mu, const UniformGrid& grid);
AtomicMeasure measure_from_nodes(const UniformGrid& grid, std::span<const double> masses);

/// Weights of the Ruelle operator. The geometric kind is p_j = |s_j'|^s and enters
/// the operator as |s_j'(x)|^s; a custom potential p_j enters as p_j(s_j(x)).
class Potential {
 public:
  enum class Kind { geometric, custom };
  using CustomFn = std::function<double(std::size_t, double)>;

  static Potential geometric(double exponent);
  /// `tail_sup(N)` must bound sum_{j>N} sup_X p_j (ignored for finite families).
  static Potential custom(CustomFn p, std::function<double(std::size_t)> tail_sup,
                          std::optional<DiniModulus> modulus = std::nullopt);

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  const std::optional<DiniModulus>& modulus() const { return modulus_; }

  /// Weight of branch j at the node x, i.e. the factor multiplying f(s_j(x)).
  double weight(const ConformalMap& sj, std::size_t j, double x) const;
  /// p_j evaluated at a point y of the domain.
  double value(const ConformalMap& sj, std::size_t j, double y) const;
  /// Upper bound on sum_{j>N} sup_X p_j; +inf when the series diverges.
  double tail_sup(const IFSFamily& family, std::size_t truncation) const;

 private:
  Kind kind_ = Kind::geometric;
  double exponent_ = 0.0;
  CustomFn custom_;
  std::function<double(std::size_t)> custom_tail_;
  std::optional<DiniModulus> modulus_;
};

/// How the terms j > N are treated. `integral` replaces the omitted Gauss-digit
/// terms by the midpoint Euler-Maclaurin integral over the continuous digit.
enum class TailModel { none, integral };
const char* to_string(TailModel model) noexcept;

struct OperatorOptions {
  std::size_t truncation = 64;
  TailModel tail_model = TailModel::none;
  unsigned workers = 0;
};

/// Collocation matrix of the Ruelle operator on a grid: (Tf)(x_i) = sum_k A_ik f_k
/// for piecewise-linear f. Rows are stored sparsely with duplicate columns merged.
class DiscreteOperator {
 public:
  DiscreteOperator(const IFSFamily& family, const Potential& potential, UniformGrid grid, OperatorOptions options);

  const UniformGrid& grid() const { return grid_; }
  std::size_t truncation() const { return truncation_; }
  /// sum_{j>N} sup p_j for the truncation in use (0 for complete finite families).
  double tail_sup() const { return tail_sup_; }
  TailModel tail_model() const { return tail_model_; }

  std::vector<double> apply(std::span<const double> f) const;
  /// A^T m: the dual operator on node masses.
  std::vector<double> apply_transpose(std::span<const double> masses) const;
  std::size_t nonzeros() const { return entries_.size(); }

 private:
  struct Entry {
    std::uint32_t col;
    double weight;
  };
  UniformGrid grid_;
  std::size_t truncation_;
  double tail_sup_;
  TailModel tail_model_;
  unsigned workers_;
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
};

struct ApplyResult {
  GridFunction value;
  double tail_bound;  // (sum_{j>N} sup p_j) * max|f|
};

/// One application of the truncated operator to f.
ApplyResult apply(const IFSFamily& family, const Potential& potential, const GridFunction& f,
                  std::size_t truncation, TailModel tail_model = TailModel::none);

/// Atoms (x, m) spawn (s_j(x), m * w_j(x)) for j <= N. No binning.
AtomicMeasure dual_apply(const IFSFamily& family, const Potential& potential, const AtomicMeasure& mu,
                         std::size_t truncation);

struct IterationRecord {
  std::size_t iteration = 0;
  double rho_lower = 0.0;
  double rho_upper = 0.0;
  double sup_residual = 0.0;
};

struct PerronOptions {
  std::size_t grid = 512;
  OperatorOptions op;
  double rho_tol = 1e-10;
  double h_tol = 1e-8;
  double mu_tol = 1e-8;
  std::size_t max_iter = 10000;
  std::size_t start_atoms = 64;
  /// Alternate positive starting function for the eigenfunction iteration.
  std::function<double(double)> start_function;
  /// Alternate starting measure for the dual iteration.
  std::optional<AtomicMeasure> start_measure;
};

struct PerronData {
  double rho = 0.0;
  Interval rho_bracket;             // Collatz-Wielandt bounds of the truncated grid operator
  Interval rho_bracket_with_tail;   // upper end widened by the omitted tail and rounding
  double tail_bound = 0.0;          // sum_{j>N} sup p_j
  UniformGrid grid;
  std::optional<GridFunction> h;
  AtomicMeasure mu;
  double pairing = 0.0;             // <mu, h>
  std::size_t iterations = 0;       // power iterations for rho
  std::size_t h_iterations = 0;     // iterations of rho^-n T^n 1
  std::size_t mu_iterations = 0;
  double sup_residual = 0.0;        // ||T h - rho h||_inf on the nodes
  double mu_drift = 0.0;            // total-variation change of the last dual step
  std::vector<IterationRecord> trace;
  std::vector<double> h_residuals;  // ||u_n - u_{n-1}||_inf for u_n = rho^-n T^n u_0
  /// min h / max h against exp(-Phi(1)) when a modulus is known (soft diagnostic).
  double h_min_over_max = 0.0;
  std::optional<double> h_floor;
};

/// Normalized power iteration g <- Tg / ||Tg|| with Collatz-Wielandt brackets.
/// Throws NonConvergenceError carrying the last bracket.
PerronData spectral_radius(const DiscreteOperator& op, double tol, std::size_t max_iter,
                           std::function<double(double)> start = {});
PerronData spectral_radius(const IFSFamily& family, const Potential& potential, std::size_t truncation,
                           std::size_t grid_size, double tol, std::size_t max_iter,
                           TailModel tail_model = TailModel::none);

/// Eigenfunction h, eigenmeasure mu and rho with <mu, 1> = 1 and <mu, h> = 1.
PerronData perron_pair(const IFSFamily& family, const Potential& potential, const PerronOptions& options);
PerronData perron_pair(const DiscreteOperator& op, const PerronOptions& options);

/// Pf = T(h f) / (rho h).
GridFunction normalized_operator(const PerronData& pd, const DiscreteOperator& op, const GridFunction& f);

struct DiniRow {
  double t = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  bool divergent = false;
};

/// Modulus of log p_j and the sums Phi(t) = sum_i alpha(s^i t). Potentials without a
/// closed-form modulus are sampled over the first `sample_maps` maps.
std::vector<DiniRow> dini_diagnostics(const Potential& potential, const IFSFamily& family,
                                      std::span<const double> t_grid, std::size_t sample_maps = 16);

/// Writes "iteration,rho_lower,rho_upper,sup_residual" rows.
void write_trace_csv(const std::vector<IterationRecord>& trace, std::ostream& os);

}  // namespace ruelle
