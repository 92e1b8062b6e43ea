#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "ruelle/dimension.hpp"
#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Accum {
  CompensatedSum lower;
  CompensatedSum upper;
  CompensatedSum dropped;
  std::size_t words = 0;
  std::size_t budget = 0;
  bool partial = false;
};

struct Enumerator {
  const std::vector<ConformalMap>& maps;
  double s;
  double psi;         // sum_{j<=N} R_j^s + tail: bounds the mass of one more symbol
  double tail;        // sum_{j>N} R_j^s
  double floor;
  std::vector<double> psi_pow;  // psi^k

  bool closed_form = false;     // every map is affine or Mobius
  Interval X;

  // I is the image of X under the current suffix v, [r, R] bounds |s_v'| on X.
  // With closed-form maps the composite m∘v is formed and its exact range is used.
  void descend(std::size_t remaining, const ConformalMap* v, const Interval& I, double r, double R,
               Accum& acc) const {
    if (remaining == 0) {
      acc.lower.add(std::pow(r, s));
      acc.upper.add(std::pow(R, s));
      ++acc.words;
      return;
    }
    const double Rs = std::pow(R, s);
    if (tail > 0.0) {
      const double omitted = tail * Rs * psi_pow[remaining - 1];
      acc.upper.add(omitted);
      acc.dropped.add(omitted);
    }
    for (const ConformalMap& m : maps) {
      std::optional<ConformalMap> mv;
      double r2, R2;
      if (closed_form && v) {
        mv = compose(m, *v);
        const Interval range = mv->abs_derivative_range(X);
        r2 = range.lo;
        R2 = range.hi;
      } else {
        const Interval range = m.abs_derivative_range(I);
        r2 = r * range.lo;
        R2 = R * range.hi;
      }
      const double bound = std::pow(R2, s) * psi_pow[remaining - 1];
      if (bound < floor || acc.words >= acc.budget) {
        if (acc.words >= acc.budget) acc.partial = true;
        acc.upper.add(bound);
        acc.dropped.add(bound);
        continue;
      }
      descend(remaining - 1, mv ? &*mv : nullptr, mv ? mv->image(X) : m.image(I), r2, R2, acc);
    }
  }
};

}  // namespace

CylinderSums cylinder_sums(const IFSFamily& family, double s, std::size_t depth, std::size_t truncation,
                           const PressureOptions& options) {
  if (depth == 0) throw Error(ErrorCode::invalid_argument, "depth must be >= 1");
  const std::size_t n = family.effective_truncation(truncation);
  const double tail = family.tail_sup(s, n);
  if (!std::isfinite(tail)) {
    std::ostringstream os;
    os << "sum_j R_j^s diverges at s = " << s;
    throw Error(ErrorCode::summability, os.str());
  }
  const std::vector<ConformalMap> maps = family.maps(n);
  CylinderSums out;

  if (family.all_affine()) {
    CompensatedSum psi;
    for (const ConformalMap& m : maps) psi.add(std::pow(m.r_inf(), s));
    const double d = static_cast<double>(depth);
    out.lower_sum = std::pow(psi.value(), d);
    out.upper_sum = std::pow(psi.value() + tail, d);
    out.dropped_mass = out.upper_sum - out.lower_sum;
    out.words = 0;
    out.exact = true;
    return out;
  }

  CompensatedSum psi_sum;
  for (const ConformalMap& m : maps) psi_sum.add(std::pow(m.R_sup(), s));
  Enumerator e{maps, s, psi_sum.value() + tail, tail, 0.0, {}, false, family.domain()};
  e.closed_form = std::all_of(maps.begin(), maps.end(), [](const ConformalMap& m) { return m.mobius_coeffs().has_value(); });
  e.floor = options.prune_tol / std::pow(static_cast<double>(n), static_cast<double>(depth));
  e.psi_pow.resize(depth + 1);
  e.psi_pow[0] = 1.0;
  for (std::size_t k = 1; k <= depth; ++k) e.psi_pow[k] = e.psi_pow[k - 1] * e.psi;

  // First level split by innermost symbol; fixed per-branch budgets keep the result scheduling-independent.
  const Interval X = family.domain();
  std::vector<Accum> branches(n);
  const std::size_t per_branch = std::max<std::size_t>(1, options.word_budget / n);
  if (tail > 0.0) {
    branches[0].upper.add(tail * e.psi_pow[depth - 1]);
    branches[0].dropped.add(tail * e.psi_pow[depth - 1]);
  }
  parallel_for(n, options.workers, [&](std::size_t b) {
    Accum& acc = branches[b];
    acc.budget = per_branch;
    const ConformalMap& m = maps[b];
    const Interval range = m.abs_derivative_range(X);
    const double bound = std::pow(range.hi, s) * e.psi_pow[depth - 1];
    if (bound < e.floor) {
      acc.upper.add(bound);
      acc.dropped.add(bound);
      return;
    }
    e.descend(depth - 1, &m, m.image(X), range.lo, range.hi, acc);
  });
  CompensatedSum lower, upper, dropped;
  for (const Accum& a : branches) {
    lower.add(a.lower.value());
    upper.add(a.upper.value());
    dropped.add(a.dropped.value());
    out.words += a.words;
    out.partial = out.partial || a.partial;
  }
  out.lower_sum = lower.value();
  out.upper_sum = upper.value();
  out.dropped_mass = dropped.value();
  return out;
}

double finiteness_exponent(const IFSFamily& family) {
  switch (family.tail_law()) {
    case TailLaw::finite:
    case TailLaw::geometric:
      return 0.0;
    case TailLaw::power_law:
      return 1.0 / family.tail_parameter();
    case TailLaw::unknown:
      break;
  }
  throw Error(ErrorCode::theta_unknown, "tail of the family is not classified; supply a lower bound for theta");
}

PressurePoint pressure(const IFSFamily& family, double s, std::size_t depth, std::size_t truncation,
                       const PressureOptions& options) {
  const CylinderSums sums = cylinder_sums(family, s, depth, truncation, options);
  PressurePoint pp;
  pp.s = s;
  pp.depth = depth;
  pp.truncation = family.effective_truncation(truncation);
  const double d = static_cast<double>(depth);
  pp.lower = sums.lower_sum > 0.0 ? std::log(sums.lower_sum) / d : -kInf;
  pp.upper = std::log(sums.upper_sum) / d;
  pp.partial = sums.partial;
  pp.exact = sums.exact;
  pp.words = sums.words;
  pp.log_rho = std::numeric_limits<double>::quiet_NaN();
  if (options.with_power_iteration) {
    const PerronData rho = spectral_radius(family, Potential::geometric(s), truncation, options.grid, options.rho_tol,
                                           options.max_iter, options.tail_model);
    pp.log_rho = std::log(rho.rho);
    pp.rho_bracket = rho.rho_bracket_with_tail;
  }
  return pp;
}

ConvexityReport convexity_check(const IFSFamily& family, std::span<const double> s_grid, std::size_t depth,
                                std::size_t truncation, const PressureOptions& options) {
  if (s_grid.size() < 3) throw Error(ErrorCode::invalid_argument, "convexity check needs at least 3 exponents");
  if (!std::is_sorted(s_grid.begin(), s_grid.end()))
    throw Error(ErrorCode::invalid_argument, "exponent grid must be ascending");
  ConvexityReport rep;
  for (double s : s_grid) {
    const PressurePoint pp = pressure(family, s, depth, truncation, options);
    rep.s.push_back(s);
    rep.f.push_back(pp.lower);
    rep.pressure.push_back(options.with_power_iteration ? pp.log_rho : pp.lower);
  }
  constexpr double slack = 1e-12;
  for (std::size_t k = 1; k + 1 < rep.s.size(); ++k) {
    const double lambda = (rep.s[k + 1] - rep.s[k]) / (rep.s[k + 1] - rep.s[k - 1]);
    const double chord = lambda * rep.f[k - 1] + (1.0 - lambda) * rep.f[k + 1];
    if (rep.f[k] > chord + slack) {
      rep.convex = false;
      std::ostringstream os;
      os << "convexity violated at s = " << rep.s[k] << ": f = " << rep.f[k] << " > chord " << chord;
      rep.defects.push_back(os.str());
    }
  }
  for (std::size_t k = 1; k < rep.s.size(); ++k) {
    if (!(rep.pressure[k] <= rep.pressure[k - 1] + slack)) {
      rep.strictly_decreasing = false;
      std::ostringstream os;
      os << "pressure not strictly decreasing between s = " << rep.s[k - 1] << " and " << rep.s[k];
      rep.defects.push_back(os.str());
    }
  }
  return rep;
}

void write_pressure_csv(std::span<const std::optional<PressurePoint>> points, std::span<const double> s_values,
                        std::ostream& os) {
  os << "s,lower,log_rho,upper\n";
  os.precision(17);
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    os << s_values[i] << ',';
    if (i < points.size() && points[i])
      os << points[i]->lower << ',' << points[i]->log_rho << ',' << points[i]->upper << '\n';
    else
      os << "divergent,divergent,divergent\n";
  }
}

}  // namespace ruelle
