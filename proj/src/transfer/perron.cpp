#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> start_vector(const UniformGrid& grid, const std::function<double(double)>& start) {
  std::vector<double> g(grid.size, 1.0);
  if (start) {
    for (std::size_t i = 0; i < grid.size; ++i) g[i] = start(grid.node(i));
    if (std::any_of(g.begin(), g.end(), [](double v) { return !(v > 0.0); }))
      throw Error(ErrorCode::invalid_argument, "starting function must be positive on the grid");
  }
  return g;
}

double dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double sum(std::span<const double> a) {
  CompensatedSum s;
  for (double v : a) s.add(v);
  return s.value();
}

}  // namespace

PerronData spectral_radius(const DiscreteOperator& op, double tol, std::size_t max_iter,
                           std::function<double(double)> start) {
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  const UniformGrid& grid = op.grid();
  std::vector<double> g = start_vector(grid, start);
  const double g0 = *std::max_element(g.begin(), g.end());
  for (double& v : g) v /= g0;

  PerronData pd;
  pd.grid = grid;
  pd.tail_bound = op.tail_sup();
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double ratio_spread = 1.0;  // max g / min g at the last bracket
  bool converged = false;
  std::size_t it = 0;
  while (it < max_iter) {
    ++it;
    const std::vector<double> tg = op.apply(g);
    lower = std::numeric_limits<double>::infinity();
    upper = 0.0;
    double gmin = std::numeric_limits<double>::infinity();
    double gmax = 0.0;
    for (std::size_t i = 0; i < grid.size; ++i) {
      if (!(g[i] > 0.0))
        throw IrreducibilityError("power iterate lost positivity", i, grid.node(i), g[i]);
      const double r = tg[i] / g[i];
      lower = std::min(lower, r);
      upper = std::max(upper, r);
      gmin = std::min(gmin, g[i]);
      gmax = std::max(gmax, g[i]);
    }
    ratio_spread = gmax / gmin;
    const double norm = *std::max_element(tg.begin(), tg.end());
    double residual = 0.0;
    for (std::size_t i = 0; i < grid.size; ++i) {
      const double next = tg[i] / norm;
      residual = std::max(residual, std::abs(next - g[i]));
      g[i] = next;
    }
    pd.trace.push_back({it, lower, upper, residual});
    if (upper - lower < tol) {
      converged = true;
      break;
    }
  }
  pd.iterations = it;
  pd.rho_bracket = {lower, upper};
  if (!converged) {
    std::ostringstream os;
    os << "Collatz-Wielandt bracket [" << lower << ", " << upper << "] wider than " << tol << " after " << it
       << " iterations";
    throw NonConvergenceError(os.str(), lower, upper, it);
  }
  pd.rho = 0.5 * (lower + upper);
  // Allowance for the rounding of the (N + interpolation)-term row sums.
  const double slack = static_cast<double>(op.truncation() + 4) * kEps * upper;
  pd.rho_bracket_with_tail = {lower - slack, upper + pd.tail_bound * ratio_spread + slack};
  pd.h = GridFunction(grid, std::move(g));
  return pd;
}

PerronData spectral_radius(const IFSFamily& family, const Potential& potential, std::size_t truncation,
                           std::size_t grid_size, double tol, std::size_t max_iter, TailModel tail_model) {
  const DiscreteOperator op(family, potential, UniformGrid::over(family.attractor_hull(), grid_size),
                            {truncation, tail_model, 0});
  return spectral_radius(op, tol, max_iter);
}

PerronData perron_pair(const IFSFamily& family, const Potential& potential, const PerronOptions& options) {
  const DiscreteOperator op(family, potential, UniformGrid::over(family.attractor_hull(), options.grid), options.op);
  PerronData pd = perron_pair(op, options);
  if (potential.kind() == Potential::Kind::geometric && family.dini()) {
    const double phi = potential.exponent() * phi_bound(*family.dini(), family.contraction(), 1.0);
    if (std::isfinite(phi)) pd.h_floor = std::exp(-phi);
  } else if (potential.modulus()) {
    const double phi = phi_bound(*potential.modulus(), family.contraction(), 1.0);
    if (std::isfinite(phi)) pd.h_floor = std::exp(-phi);
  }
  return pd;
}

PerronData perron_pair(const DiscreteOperator& op, const PerronOptions& options) {
  PerronData pd = spectral_radius(op, options.rho_tol, options.max_iter, options.start_function);
  const UniformGrid& grid = op.grid();
  const std::vector<double> g = pd.h->values();

  // Eigenmeasure: rho^-n T*^n xi, binned to the nodes after every step.
  const AtomicMeasure xi =
      options.start_measure ? *options.start_measure : AtomicMeasure::uniform(Interval{grid.lo, grid.hi}, options.start_atoms);
  std::vector<double> m = bin_to_grid(xi, grid);
  {
    const double total = sum(m);
    if (!(total > 0.0)) throw Error(ErrorCode::invalid_argument, "starting measure has no mass");
    for (double& v : m) v /= total;
  }
  bool converged = false;
  std::size_t it = 0;
  while (it < options.max_iter) {
    ++it;
    std::vector<double> next = op.apply_transpose(m);
    const double total = sum(next);
    double drift = 0.0;
    for (std::size_t i = 0; i < grid.size; ++i) {
      next[i] /= total;
      drift += std::abs(next[i] - m[i]);
    }
    m = std::move(next);
    pd.mu_drift = drift;
    if (drift < options.mu_tol) {
      converged = true;
      break;
    }
  }
  pd.mu_iterations = it;
  if (!converged)
    throw NonConvergenceError("dual iteration did not settle", pd.rho_bracket.lo, pd.rho_bracket.hi, it);

  // Two-sided eigenvalue estimate, second order in the eigenvector errors.
  const std::vector<double> tg = op.apply(g);
  const double rho = std::clamp(dot(m, tg) / dot(m, g), pd.rho_bracket.lo, pd.rho_bracket.hi);
  pd.rho = rho;

  // Eigenfunction: u_n = rho^-n T^n u_0.
  std::vector<double> u = start_vector(grid, options.start_function);
  converged = false;
  it = 0;
  while (it < options.max_iter) {
    ++it;
    std::vector<double> next = op.apply(u);
    double residual = 0.0;
    for (std::size_t i = 0; i < grid.size; ++i) {
      next[i] /= rho;
      residual = std::max(residual, std::abs(next[i] - u[i]));
    }
    u = std::move(next);
    pd.h_residuals.push_back(residual);
    if (residual < options.h_tol) {
      converged = true;
      break;
    }
  }
  pd.h_iterations = it;
  if (!converged)
    throw NonConvergenceError("rho^-n T^n 1 is not Cauchy on the grid", pd.rho_bracket.lo, pd.rho_bracket.hi, it);

  const double scale = dot(m, u);
  for (double& v : u) v /= scale;
  for (std::size_t i = 0; i < grid.size; ++i)
    if (!(u[i] > 0.0)) throw IrreducibilityError("eigenfunction is not strictly positive", i, grid.node(i), u[i]);

  const std::vector<double> th = op.apply(u);
  double res = 0.0;
  for (std::size_t i = 0; i < grid.size; ++i) res = std::max(res, std::abs(th[i] - rho * u[i]));
  pd.sup_residual = res;
  pd.pairing = dot(m, u);
  pd.h = GridFunction(grid, std::move(u));
  pd.h_min_over_max = pd.h->min() / pd.h->max();
  pd.mu = measure_from_nodes(grid, m);
  return pd;
}

GridFunction normalized_operator(const PerronData& pd, const DiscreteOperator& op, const GridFunction& f) {
  if (!pd.h) throw Error(ErrorCode::invalid_argument, "normalized operator needs an eigenfunction");
  const std::vector<double>& h = pd.h->values();
  if (f.values().size() != h.size()) throw Error(ErrorCode::invalid_argument, "grid mismatch");
  std::vector<double> hf(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > std::numeric_limits<double>::min()))
      throw IrreducibilityError("eigenfunction underflows", i, op.grid().node(i), h[i]);
    hf[i] = h[i] * f.values()[i];
  }
  std::vector<double> out = op.apply(hf);
  for (std::size_t i = 0; i < h.size(); ++i) out[i] /= pd.rho * h[i];
  return GridFunction(op.grid(), std::move(out));
}

void write_trace_csv(const std::vector<IterationRecord>& trace, std::ostream& os) {
  os << "iteration,rho_lower,rho_upper,sup_residual\n";
  os.precision(17);
  for (const IterationRecord& r : trace)
    os << r.iteration << ',' << r.rho_lower << ',' << r.rho_upper << ',' << r.sup_residual << '\n';
}

}  // namespace ruelle
