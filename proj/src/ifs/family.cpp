#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/ifs.hpp"

namespace ruelle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Maps inspected for flags and hull bounds on infinite families.
constexpr std::size_t kInfiniteProbe = 256;

DiniModulus zero_modulus() { return {[](double) { return 0.0; }, 0.0}; }

DiniModulus gauss_modulus(double min_digit, const Interval& domain) {
  // |log|s_d'(x)| - log|s_d'(y)|| = 2 log((d + max)/(d + min)), worst at d = m, x = lo.
  const double base = min_digit + domain.lo;
  const double diam = domain.width();
  return {[base, diam](double t) { return 2.0 * std::log1p(std::min(std::max(t, 0.0), diam) / base); }, 2.0 / base};
}

void require_domain(const Interval& domain) {
  if (!(domain.lo < domain.hi)) throw Error(ErrorCode::invalid_argument, "family domain must have lo < hi");
}

}  // namespace

const char* to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::affine_geometric: return "affine-geometric";
    case FamilyKind::gauss_digit_set: return "gauss-digit-set";
    case FamilyKind::explicit_finite_list: return "explicit-finite-list";
    case FamilyKind::custom_parametric: return "custom-parametric";
  }
  return "unknown";
}

const char* to_string(TailLaw law) noexcept {
  switch (law) {
    case TailLaw::finite: return "finite";
    case TailLaw::geometric: return "geometric";
    case TailLaw::power_law: return "power-law";
    case TailLaw::unknown: return "unknown";
  }
  return "unknown";
}

IFSFamily::IFSFamily(Spec spec) : spec_(std::move(spec)) {
  require_domain(spec_.domain);
  if (!spec_.generator) throw Error(ErrorCode::invalid_argument, "family needs a map generator");
  if (spec_.size && *spec_.size == 0) throw Error(ErrorCode::invalid_argument, "family needs at least one map");

  const std::size_t probe = spec_.size ? *spec_.size : kInfiniteProbe;
  double sup_ratio = 0.0;
  for (std::size_t j = 1; j <= probe; ++j) {
    const ConformalMap m = spec_.generator(j);
    sup_ratio = std::max(sup_ratio, m.R_sup());
    std::ostringstream os;
    if (!(m.r_inf() > 0.0)) {
      os << "map " << j << ": inf |s'| = " << m.r_inf() << " is not positive";
      flags_.push_back(os.str());
    } else if (!(m.R_sup() < 1.0)) {
      os << "map " << j << ": sup |s'| = " << m.R_sup() << " >= 1 (not a contraction on the domain)";
      flags_.push_back(os.str());
    }
    const Interval img = m.image(spec_.domain);
    const double slack = 1e-14 * std::max(1.0, spec_.domain.width());
    if (img.lo < spec_.domain.lo - slack || img.hi > spec_.domain.hi + slack) {
      std::ostringstream inv;
      inv << "map " << j << ": image " << img << " leaves the domain " << spec_.domain;
      flags_.push_back(inv.str());
    }
  }
  contraction_ = spec_.contraction.value_or(sup_ratio);

  // Hull of the limit set: iterate H <- hull(U s_j(H)) from the domain.
  hull_ = spec_.domain;
  for (int iter = 0; iter < 400; ++iter) {
    Interval next = spec_.generator(1).image(hull_);
    for (std::size_t j = 2; j <= probe; ++j) next = next.unite(spec_.generator(j).image(hull_));
    if (spec_.accumulation_point) next = next.unite(Interval{*spec_.accumulation_point, *spec_.accumulation_point});
    const bool settled = std::abs(next.lo - hull_.lo) <= 1e-17 && std::abs(next.hi - hull_.hi) <= 1e-17;
    hull_ = next;
    if (settled) break;
  }
}

std::size_t IFSFamily::effective_truncation(std::size_t n) const {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "truncation must be >= 1");
  return spec_.size ? std::min(n, *spec_.size) : n;
}

ConformalMap IFSFamily::map_at(std::size_t j) const {
  if (j == 0 || (spec_.size && j > *spec_.size)) {
    std::ostringstream os;
    os << "index " << j << " not in family";
    if (spec_.size) os << " of size " << *spec_.size;
    throw Error(ErrorCode::index_out_of_family, os.str());
  }
  return spec_.generator(j);
}

double IFSFamily::tail_sup(double t, std::size_t n) const {
  if (spec_.size && n >= *spec_.size) return 0.0;
  if (!spec_.tail_sup) return kInf;
  return spec_.tail_sup(t, n);
}

std::vector<ConformalMap> IFSFamily::maps(std::size_t n) const {
  const std::size_t count = effective_truncation(n);
  std::vector<ConformalMap> out;
  out.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) out.push_back(spec_.generator(j));
  return out;
}

IFSFamily make_affine_geometric(double q, double p, Interval domain, double margin) {
  if (!(q > 0.0 && q < 1.0 && p > 0.0 && p < 1.0))
    throw Error(ErrorCode::invalid_argument, "affine-geometric family needs 0 < ratio, offset < 1");
  IFSFamily::Spec spec;
  spec.kind = FamilyKind::affine_geometric;
  spec.domain = domain;
  spec.margin = margin;
  spec.generator = [q, p, domain](std::size_t j) {
    const double slope = std::pow(q, static_cast<double>(j));
    return ConformalMap::affine(slope, std::pow(p, static_cast<double>(j)) - slope, domain);
  };
  spec.tail_law = TailLaw::geometric;
  spec.tail_parameter = q;
  spec.tail_sup = [q](double t, std::size_t n) {
    if (!(t > 0.0)) return kInf;
    const double qt = std::pow(q, t);
    return std::pow(qt, static_cast<double>(n + 1)) / (1.0 - qt);
  };
  spec.dini = zero_modulus();
  spec.accumulation_point = 0.0;
  spec.contraction = q;
  spec.all_affine = true;
  std::ostringstream os;
  os << "s_j(x) = " << q << "^j x + " << p << "^j - " << q << "^j";
  spec.description = os.str();
  return IFSFamily(std::move(spec));
}

IFSFamily make_gauss_digits(std::vector<std::uint32_t> digits, Interval domain, double margin) {
  if (digits.empty()) throw Error(ErrorCode::invalid_argument, "digit set is empty");
  if (std::any_of(digits.begin(), digits.end(), [](std::uint32_t d) { return d == 0; }))
    throw Error(ErrorCode::invalid_argument, "digits must be >= 1");
  if (domain.lo < 0.0) throw Error(ErrorCode::invalid_argument, "Gauss digit maps need a domain inside [0, inf)");
  const double m = *std::min_element(digits.begin(), digits.end());
  IFSFamily::Spec spec;
  spec.kind = FamilyKind::gauss_digit_set;
  spec.domain = domain;
  spec.margin = margin;
  spec.size = digits.size();
  spec.generator = [digits, domain](std::size_t j) { return ConformalMap::gauss_digit(digits.at(j - 1), domain); };
  spec.tail_law = TailLaw::finite;
  spec.dini = gauss_modulus(m, domain);
  spec.distortion_closed_form = std::pow((m + domain.hi) / (m + domain.lo), 2);
  std::ostringstream os;
  os << "s_d(x) = 1/(d + x), d in {";
  for (std::size_t i = 0; i < digits.size(); ++i) os << (i ? "," : "") << digits[i];
  os << "}";
  spec.description = os.str();
  return IFSFamily(std::move(spec));
}

IFSFamily make_gauss_infinite(std::uint32_t min_digit, Interval domain, double margin) {
  if (min_digit == 0) throw Error(ErrorCode::invalid_argument, "min digit must be >= 1");
  if (domain.lo < 0.0) throw Error(ErrorCode::invalid_argument, "Gauss digit maps need a domain inside [0, inf)");
  const double m = min_digit;
  IFSFamily::Spec spec;
  spec.kind = FamilyKind::gauss_digit_set;
  spec.domain = domain;
  spec.margin = margin;
  spec.generator = [min_digit, domain](std::size_t j) {
    return ConformalMap::gauss_digit(static_cast<std::uint32_t>(min_digit - 1 + j), domain);
  };
  spec.tail_law = TailLaw::power_law;
  spec.tail_parameter = 2.0;
  const double lo = domain.lo;
  spec.tail_sup = [m, lo](double t, std::size_t n) {
    if (!(t > 0.5)) return kInf;
    // sum_{d >= D} (d + lo)^{-2t} <= (D + lo)^{-2t} + int_D^inf (y + lo)^{-2t} dy
    const double first = m + static_cast<double>(n) + lo;
    return std::pow(first, -2.0 * t) + std::pow(first, 1.0 - 2.0 * t) / (2.0 * t - 1.0);
  };
  spec.dini = gauss_modulus(m, domain);
  spec.distortion_closed_form = std::pow((m + domain.hi) / (m + domain.lo), 2);
  spec.accumulation_point = 0.0;
  spec.contraction = 1.0 / ((m + domain.lo) * (m + domain.lo));
  std::ostringstream os;
  os << "s_d(x) = 1/(d + x), d >= " << min_digit;
  spec.description = os.str();
  return IFSFamily(std::move(spec));
}

IFSFamily make_explicit_affine(std::vector<AffineCoeffs> maps, Interval domain, double margin) {
  if (maps.empty()) throw Error(ErrorCode::invalid_argument, "explicit family needs at least one map");
  IFSFamily::Spec spec;
  spec.kind = FamilyKind::explicit_finite_list;
  spec.domain = domain;
  spec.margin = margin;
  spec.size = maps.size();
  spec.generator = [maps, domain](std::size_t j) {
    const AffineCoeffs& a = maps.at(j - 1);
    return ConformalMap::affine(a.slope, a.intercept, domain);
  };
  spec.tail_law = TailLaw::finite;
  spec.dini = zero_modulus();
  spec.all_affine = true;
  std::ostringstream os;
  os << maps.size() << " affine maps";
  spec.description = os.str();
  return IFSFamily(std::move(spec));
}

IFSFamily make_power_law(double scale, double beta, Interval domain, double margin) {
  if (!(scale > 0.0 && scale < 1.0 && beta > 1.0))
    throw Error(ErrorCode::invalid_argument, "power-law family needs 0 < scale < 1 and exponent > 1");
  const double total = scale * std::riemann_zeta(beta);
  IFSFamily::Spec spec;
  spec.kind = FamilyKind::custom_parametric;
  spec.domain = domain;
  spec.margin = margin;
  spec.generator = [scale, beta, domain](std::size_t j) {
    double offset = 0.0;
    for (std::size_t i = 1; i < j; ++i) offset += scale * std::pow(static_cast<double>(i), -beta);
    return ConformalMap::affine(scale * std::pow(static_cast<double>(j), -beta), offset, domain);
  };
  spec.tail_law = TailLaw::power_law;
  spec.tail_parameter = beta;
  spec.tail_sup = [scale, beta](double t, std::size_t n) {
    if (!(beta * t > 1.0)) return kInf;
    const double first = static_cast<double>(n + 1);
    return std::pow(scale, t) * (std::pow(first, -beta * t) + std::pow(first, 1.0 - beta * t) / (beta * t - 1.0));
  };
  spec.dini = zero_modulus();
  spec.accumulation_point = total;
  spec.contraction = scale;
  spec.all_affine = true;
  std::ostringstream os;
  os << "affine ratios " << scale << " j^-" << beta << " packed from 0";
  spec.description = os.str();
  return IFSFamily(std::move(spec));
}

}  // namespace ruelle
