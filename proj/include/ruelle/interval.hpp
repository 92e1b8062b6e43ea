#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ruelle {

/// Closed real interval [lo, hi]. Also used for open intervals where the caller says so.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval hull(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  Interval unite(const Interval& o) const { return {std::min(lo, o.lo), std::max(hi, o.hi)}; }
  Interval enlarged(double margin) const { return {lo - margin, hi + margin}; }

  bool operator==(const Interval&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.lo << ", " << iv.hi << ']';
}

}  // namespace ruelle
