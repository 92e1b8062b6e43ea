#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ruelle/dimension.hpp"
#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {
namespace {

// psi(t) = sum_j R_j^t over the truncation, plus the certified tail when `with_tail`.
double psi(const IFSFamily& family, double t, std::size_t truncation, bool with_tail) {
  CompensatedSum sum;
  for (const ConformalMap& m : family.maps(truncation)) sum.add(std::pow(m.R_sup(), t));
  return sum.value() + (with_tail ? family.tail_sup(t, truncation) : 0.0);
}

class SignOracle {
 public:
  SignOracle(const IFSFamily& family, std::size_t min_depth, std::size_t max_depth, std::size_t truncation,
             PressureOptions options)
      : family_(family), min_depth_(min_depth), max_depth_(max_depth), truncation_(truncation), options_(options) {
    options_.with_power_iteration = false;
  }

  // +1: pressure certified positive, -1: certified negative, 0: undecided at the maximum depth.
  int decide(double s, PressurePoint* witness = nullptr) {
    for (std::size_t d = min_depth_; d <= max_depth_; ++d) {
      const PressurePoint pp = pressure(family_, s, d, truncation_, options_);
      deepest_ = std::max(deepest_, d);
      if (pp.lower > 0.0 || pp.upper < 0.0 || pp.exact || d == max_depth_) {
        if (witness) *witness = pp;
        if (pp.lower > 0.0) return 1;
        if (pp.upper < 0.0) return -1;
        return 0;
      }
    }
    return 0;
  }

  std::size_t deepest() const { return deepest_; }

 private:
  const IFSFamily& family_;
  std::size_t min_depth_;
  std::size_t max_depth_;
  std::size_t truncation_;
  PressureOptions options_;
  std::size_t deepest_ = 0;
};

double log_rho(const IFSFamily& family, double s, std::size_t truncation, const PressureOptions& o) {
  return std::log(spectral_radius(family, Potential::geometric(s), truncation, o.grid, o.rho_tol, o.max_iter,
                                  o.tail_model)
                      .rho);
}

}  // namespace

MoranResult moran_root(std::span<const double> ratios) {
  if (ratios.empty()) throw Error(ErrorCode::invalid_argument, "moran_root needs at least one ratio");
  for (double r : ratios)
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::invalid_argument, "ratios must lie in (0, 1)");
  if (ratios.size() == 1) return {0.0, true};
  auto f = [&](double s) {
    CompensatedSum sum;
    for (double r : ratios) sum.add(std::pow(r, s));
    return sum.value() - 1.0;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), false};
}

DimensionResult hausdorff_dimension(const IFSFamily& family, std::size_t depth, std::size_t truncation,
                                    const DimensionOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  DimensionResult res;
  res.truncation = family.effective_truncation(truncation);
  try {
    res.theta = finiteness_exponent(family);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::theta_unknown || !options.theta_lower_bound) throw;
    res.theta = *options.theta_lower_bound;
  }
  res.psi_at_theta_diverges = !family.finite();

  const double s_lo = res.theta + options.theta_offset;
  const double s_hi = options.s_max;
  res.psi_low = psi(family, s_lo, truncation, false);
  res.psi_high = psi(family, s_hi, truncation, true);
  if (!(res.psi_low > 1.0) || !(res.psi_high < 1.0)) {
    std::ostringstream os;
    os << "root hypothesis fails: psi(" << s_lo << ") = " << res.psi_low << ", upper bound on psi(" << s_hi
       << ") = " << res.psi_high << " (need psi(theta+) > 1 > psi(inf))";
    throw NoRootError(os.str(), {{s_lo, res.psi_low}, {s_hi, res.psi_high}});
  }

  SignOracle oracle(family, std::max<std::size_t>(1, std::min(options.min_depth, depth)), depth, truncation,
                    options.pressure);
  double L = s_lo;
  double H = s_hi;
  if (oracle.decide(L, &res.at_lo) <= 0 || oracle.decide(H, &res.at_hi) >= 0) {
    std::ostringstream os;
    os << "pressure sign change not certified on [" << L << ", " << H << "]";
    throw NoRootError(os.str(), {{s_lo, res.psi_low}, {s_hi, res.psi_high}});
  }

  std::size_t steps = 0;
  while (H - L > options.tol) {
    const double mid = 0.5 * (L + H);
    if (mid <= L || mid >= H) break;
    ++steps;
    PressurePoint pp;
    const int sign = oracle.decide(mid, &pp);
    if (sign > 0) {
      L = mid;
      res.at_lo = pp;
    } else if (sign < 0) {
      H = mid;
      res.at_hi = pp;
    } else {
      // Undecidable zone around the root: tighten each certified edge towards it.
      res.budget_exhausted = true;
      double zone = mid;
      while (zone - L > options.tol) {
        const double m = 0.5 * (L + zone);
        if (m <= L || m >= zone) break;
        ++steps;
        PressurePoint q;
        const int sg = oracle.decide(m, &q);
        if (sg > 0) {
          L = m;
          res.at_lo = q;
        } else {
          zone = m;
        }
      }
      zone = mid;
      while (H - zone > options.tol) {
        const double m = 0.5 * (zone + H);
        if (m <= zone || m >= H) break;
        ++steps;
        PressurePoint q;
        const int sg = oracle.decide(m, &q);
        if (sg < 0) {
          H = m;
          res.at_hi = q;
        } else {
          zone = m;
        }
      }
      break;
    }
  }
  res.a_lo = L;
  res.a_hi = H;
  res.iterations = steps;
  res.depth = oracle.deepest();
  res.certified = !res.budget_exhausted && H - L <= options.tol;

  // Non-certified point estimate: Illinois iteration on the grid pressure inside [L, H].
  res.a = 0.5 * (L + H);
  if (options.pressure.with_power_iteration) {
    double a = L, b = H;
    double fa = log_rho(family, a, truncation, options.pressure);
    double fb = log_rho(family, b, truncation, options.pressure);
    if (fa == 0.0) {
      res.a = a;
    } else if (fb == 0.0) {
      res.a = b;
    } else if ((fa > 0.0) != (fb > 0.0)) {
      int side = 0;
      double c = res.a;
      for (int i = 0; i < 100; ++i) {
        c = (a * fb - b * fa) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        const double fc = log_rho(family, c, truncation, options.pressure);
        if (fc == 0.0 || b - a < 1e-15) break;
        if ((fc > 0.0) == (fa > 0.0)) {
          a = c;
          fa = fc;
          if (side == -1) fb *= 0.5;
          side = -1;
        } else {
          b = c;
          fb = fc;
          if (side == 1) fa *= 0.5;
          side = 1;
        }
        if (std::abs(fc) < 1e-15) break;
      }
      res.a = c;
    }
  }
  return res;
}

}  // namespace ruelle
