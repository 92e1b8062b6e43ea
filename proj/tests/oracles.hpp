#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ruelle/interval.hpp"

namespace oracle {

// Independent bisection for sum_j r_j^s = 1.
inline double moran_oracle(const std::vector<double>& r) {
  double lo = 0, hi = 20;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    double sum = 0;
    for (double x : r) sum += std::pow(x, mid);
    (sum > 1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Roots of sum r_w^s = 1 and sum R_w^s = 1 over all digit-{1,2} words of length n on [lo, hi],
// with |s_w'| computed from the explicit chain rule at both endpoints.
inline ruelle::Interval cylinder_root_oracle(int n, double lo, double hi) {
  std::vector<double> r, R;
  for (long mask = 0; mask < (1L << n); ++mask) {
    auto deriv = [&](double x) {
      double d = 1.0;
      for (int k = n - 1; k >= 0; --k) {
        const double digit = 1.0 + ((mask >> k) & 1);
        d /= (digit + x) * (digit + x);
        x = 1.0 / (digit + x);
      }
      return d;
    };
    const double a = deriv(lo), b = deriv(hi);
    r.push_back(std::min(a, b));
    R.push_back(std::max(a, b));
  }
  return {moran_oracle(r), moran_oracle(R)};
}

}  // namespace oracle
