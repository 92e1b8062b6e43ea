#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/ifs.hpp"

namespace ruelle {

std::string Word::to_string() const {
  if (symbols.empty()) return "e";
  std::ostringstream os;
  for (std::size_t i = 0; i < symbols.size(); ++i) os << (i ? "." : "") << symbols[i];
  return os.str();
}

ConformalMap compose_word(const IFSFamily& family, const Word& u) {
  ConformalMap result = ConformalMap::identity(family.domain());
  for (const std::uint32_t symbol : u.symbols) result = compose(result, family.map_at(symbol));
  return result;
}

ContractionBounds contraction_bounds(const IFSFamily& family, const Word& u) {
  if (u.empty()) throw Error(ErrorCode::invalid_argument, "contraction bounds need a non-empty word");
  const Interval range = compose_word(family, u).abs_derivative_range(family.domain());
  return {range.lo, range.hi};
}

CodingPoint coding_map(const IFSFamily& family, const Word& u, double base) {
  if (!family.domain().contains(base)) {
    std::ostringstream os;
    os << "base point " << base << " outside " << family.domain();
    throw Error(ErrorCode::domain, os.str());
  }
  double x = base;
  for (auto it = u.symbols.rbegin(); it != u.symbols.rend(); ++it) x = family.map_at(*it)(x);
  const double s = std::min(family.contraction(), 1.0);
  double bound = std::pow(s, static_cast<double>(u.size())) * family.domain().width();
  // Both the point and part of the limit set lie in the cylinder s_u(X), of length at most R_u diam(X).
  if (!u.empty()) {
    const double r_u = compose_word(family, u).abs_derivative_range(family.domain()).hi;
    bound = std::min(bound, r_u * (1.0 + 1e-12) * family.domain().width());
  }
  return {x, bound};
}

double phi_bound(const DiniModulus& modulus, double s, double t) {
  if (modulus.lipschitz == 0.0 && modulus.alpha(t) == 0.0) return 0.0;
  if (!(s < 1.0)) return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  double scale = t;
  int i = 0;
  // Terms until the Lipschitz remainder L t s^i / (1 - s) is negligible.
  for (; i < 10000; ++i) {
    const double remainder = modulus.lipschitz * scale / (1.0 - s);
    if (remainder <= 1e-17 * std::max(sum, 1e-300) || scale == 0.0) break;
    sum += modulus.alpha(scale);
    scale *= s;
  }
  return sum + modulus.lipschitz * scale / (1.0 - s);
}

DistortionData estimate_distortion(const IFSFamily& family, std::size_t truncation, std::size_t verify_depth) {
  DistortionData d;
  const double diam = family.domain().width();
  d.delta = diam;
  if (family.all_affine()) {
    d.c1 = 1.0;
    d.phi_at_1 = 0.0;
    d.method = "affine";
  } else {
    double best = std::numeric_limits<double>::infinity();
    if (family.dini()) {
      const double s = family.contraction();
      d.phi_at_1 = phi_bound(*family.dini(), s, 1.0);
      const double via_phi = std::exp(phi_bound(*family.dini(), s, std::min(1.0, diam)));
      if (std::isfinite(via_phi)) {
        best = via_phi;
        d.method = "dini";
      }
    } else {
      d.phi_at_1 = std::numeric_limits<double>::infinity();
    }
    if (family.distortion_closed_form() && *family.distortion_closed_form() < best) {
      best = *family.distortion_closed_form();
      d.method = "closed-form";
    }
    if (!std::isfinite(best))
      throw Error(ErrorCode::unbounded_distortion,
                  "no certified distortion bound: family is non-affine and its Dini sum diverges or is unavailable");
    d.c1 = best;
  }
  // On an interval domain the mean value theorem gives r_u |x-y| <= |s_u x - s_u y| <= R_u |x-y|
  // for every pair, so the local and global bi-Lipschitz constants coincide with c1.
  d.c2 = d.c1;
  d.c3 = d.c1;

  if (verify_depth > 0) {
    const std::size_t n = family.effective_truncation(truncation);
    std::vector<std::uint32_t> symbols;
    double worst = 1.0;
    for (std::size_t len = 1; len <= verify_depth; ++len) {
      symbols.assign(len, 1);
      while (true) {
        const ContractionBounds b = contraction_bounds(family, Word(symbols));
        worst = std::max(worst, b.R / b.r);
        std::size_t pos = len;
        while (pos > 0 && symbols[pos - 1] == n) symbols[--pos] = 1;
        if (pos == 0) break;
        ++symbols[pos - 1];
      }
    }
    d.max_observed_ratio = worst;
  }
  return d;
}

}  // namespace ruelle
