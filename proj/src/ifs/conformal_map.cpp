#include <algorithm>
#include <cmath>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/ifs.hpp"

namespace ruelle {
namespace {

MobiusCoeffs to_mobius(const AffineCoeffs& a) { return {a.slope, a.intercept, 0.0, 1.0, a.slope}; }

double determinant(const MobiusCoeffs& m) { return std::isnan(m.det) ? m.a * m.d - m.b * m.c : m.det; }

// Matrix product, rescaled so the largest entry has magnitude 1.
MobiusCoeffs multiply(const MobiusCoeffs& o, const MobiusCoeffs& i) {
  MobiusCoeffs r{o.a * i.a + o.b * i.c, o.a * i.b + o.b * i.d, o.c * i.a + o.d * i.c, o.c * i.b + o.d * i.d,
                 determinant(o) * determinant(i)};
  const double scale = std::max({std::abs(r.a), std::abs(r.b), std::abs(r.c), std::abs(r.d)});
  if (scale > 0.0 && (scale > 1e100 || scale < 1e-100)) {
    r.a /= scale;
    r.b /= scale;
    r.c /= scale;
    r.d /= scale;
    r.det /= scale * scale;
  }
  return r;
}

double mobius_eval(const MobiusCoeffs& m, double x) { return (m.a * x + m.b) / (m.c * x + m.d); }

double mobius_deriv(const MobiusCoeffs& m, double x) {
  const double den = m.c * x + m.d;
  return determinant(m) / (den * den);
}

void require_no_pole(const MobiusCoeffs& m, const Interval& iv) {
  const double at_lo = m.c * iv.lo + m.d;
  const double at_hi = m.c * iv.hi + m.d;
  if (at_lo == 0.0 || at_hi == 0.0 || (at_lo < 0.0) != (at_hi < 0.0)) {
    std::ostringstream os;
    os << "Mobius map has a pole inside " << iv;
    throw Error(ErrorCode::domain, os.str());
  }
}

}  // namespace

ConformalMap::ConformalMap() : ConformalMap(AffineCoeffs{}, Interval{0.0, 1.0}) {}

ConformalMap::ConformalMap(Rep rep, Interval domain) : rep_(std::move(rep)), domain_(domain) {
  if (std::holds_alternative<MobiusCoeffs>(rep_)) require_no_pole(std::get<MobiusCoeffs>(rep_), domain_);
  bounds_ = abs_derivative_range(domain_);
}

ConformalMap ConformalMap::identity(Interval domain) { return ConformalMap(AffineCoeffs{}, domain); }

ConformalMap ConformalMap::affine(double slope, double intercept, Interval domain) {
  if (slope == 0.0) throw Error(ErrorCode::invalid_argument, "affine map with zero slope is not conformal");
  return ConformalMap(AffineCoeffs{slope, intercept}, domain);
}

ConformalMap ConformalMap::mobius(MobiusCoeffs m, Interval domain) {
  if (determinant(m) == 0.0) throw Error(ErrorCode::invalid_argument, "degenerate Mobius map");
  if (m.c == 0.0) return affine(m.a / m.d, m.b / m.d, domain);
  return ConformalMap(m, domain);
}

ConformalMap ConformalMap::gauss_digit(std::uint32_t digit, Interval domain) {
  return mobius({0.0, 1.0, 1.0, static_cast<double>(digit)}, domain);
}

ConformalMap ConformalMap::generic(Fn eval, Fn deriv, RangeFn abs_deriv_range, Interval domain, bool monotone) {
  if (!eval || !deriv || !abs_deriv_range)
    throw Error(ErrorCode::invalid_argument, "generic map needs eval, derivative and |derivative| range");
  auto leaf = std::make_shared<const Leaf>(Leaf{std::move(eval), std::move(deriv), std::move(abs_deriv_range), monotone});
  return ConformalMap(Chain{{std::move(leaf)}}, domain);
}

ConformalMap::Chain ConformalMap::as_chain(const Rep& rep) {
  if (const auto* chain = std::get_if<Chain>(&rep)) return *chain;
  MobiusCoeffs m = std::holds_alternative<AffineCoeffs>(rep) ? to_mobius(std::get<AffineCoeffs>(rep))
                                                             : std::get<MobiusCoeffs>(rep);
  Leaf leaf;
  leaf.eval = [m](double x) { return mobius_eval(m, x); };
  leaf.deriv = [m](double x) { return mobius_deriv(m, x); };
  leaf.range = [m](const Interval& iv) {
    const double a = std::abs(mobius_deriv(m, iv.lo));
    const double b = std::abs(mobius_deriv(m, iv.hi));
    return Interval::hull(a, b);
  };
  leaf.monotone = true;
  return Chain{{std::make_shared<const Leaf>(std::move(leaf))}};
}

double ConformalMap::operator()(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AffineCoeffs>) {
          return r.slope * x + r.intercept;
        } else if constexpr (std::is_same_v<T, MobiusCoeffs>) {
          return mobius_eval(r, x);
        } else {
          double y = x;
          for (auto it = r.factors.rbegin(); it != r.factors.rend(); ++it) y = (*it)->eval(y);
          return y;
        }
      },
      rep_);
}

double ConformalMap::derivative(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AffineCoeffs>) {
          return r.slope;
        } else if constexpr (std::is_same_v<T, MobiusCoeffs>) {
          return mobius_deriv(r, x);
        } else {
          double y = x;
          double d = 1.0;
          for (auto it = r.factors.rbegin(); it != r.factors.rend(); ++it) {
            d *= (*it)->deriv(y);
            y = (*it)->eval(y);
          }
          return d;
        }
      },
      rep_);
}

Interval ConformalMap::leaf_image(const Leaf& f, const Interval& cur) {
  if (f.monotone) return Interval::hull(f.eval(cur.lo), f.eval(cur.hi));
  // Lipschitz enclosure over 64 pieces.
  constexpr int pieces = 64;
  const double h = cur.width() / pieces;
  Interval out = Interval::hull(f.eval(cur.lo), f.eval(cur.lo));
  for (int k = 0; k < pieces; ++k) {
    const Interval piece{cur.lo + k * h, k + 1 == pieces ? cur.hi : cur.lo + (k + 1) * h};
    const double lip = f.range(piece).hi;
    const double y0 = f.eval(piece.lo);
    const double y1 = f.eval(piece.hi);
    const double slack = 0.5 * lip * piece.width();
    out = out.unite(Interval{std::min(y0, y1) - slack, std::max(y0, y1) + slack});
  }
  return out;
}

Interval ConformalMap::image(const Interval& iv) const {
  if (const auto* chain = std::get_if<Chain>(&rep_)) {
    Interval cur = iv;
    for (auto it = chain->factors.rbegin(); it != chain->factors.rend(); ++it) {
      cur = leaf_image(**it, cur);
    }
    return cur;
  }
  return Interval::hull((*this)(iv.lo), (*this)(iv.hi));
}

double ConformalMap::image_width(const Interval& iv) const {
  if (const auto* a = std::get_if<AffineCoeffs>(&rep_)) return std::abs(a->slope) * iv.width();
  if (const auto* m = std::get_if<MobiusCoeffs>(&rep_)) {
    require_no_pole(*m, iv);
    return std::abs(determinant(*m)) * iv.width() / (std::abs(m->c * iv.lo + m->d) * std::abs(m->c * iv.hi + m->d));
  }
  return image(iv).width();
}

Interval ConformalMap::abs_derivative_range(const Interval& iv) const {
  return std::visit(
      [&iv](const auto& r) -> Interval {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AffineCoeffs>) {
          const double s = std::abs(r.slope);
          return {s, s};
        } else if constexpr (std::is_same_v<T, MobiusCoeffs>) {
          require_no_pole(r, iv);
          return Interval::hull(std::abs(mobius_deriv(r, iv.lo)), std::abs(mobius_deriv(r, iv.hi)));
        } else {
          Interval cur = iv;
          Interval prod{1.0, 1.0};
          for (auto it = r.factors.rbegin(); it != r.factors.rend(); ++it) {
            const Interval f = (*it)->range(cur);
            prod = {prod.lo * f.lo, prod.hi * f.hi};
            cur = leaf_image(**it, cur);
          }
          return prod;
        }
      },
      rep_);
}

bool ConformalMap::monotone_certified() const {
  if (const auto* chain = std::get_if<Chain>(&rep_))
    return std::all_of(chain->factors.begin(), chain->factors.end(), [](const auto& f) { return f->monotone; });
  return true;
}

std::optional<AffineCoeffs> ConformalMap::affine_coeffs() const {
  if (const auto* a = std::get_if<AffineCoeffs>(&rep_)) return *a;
  return std::nullopt;
}

std::optional<MobiusCoeffs> ConformalMap::mobius_coeffs() const {
  if (const auto* m = std::get_if<MobiusCoeffs>(&rep_)) return *m;
  if (const auto* a = std::get_if<AffineCoeffs>(&rep_)) return to_mobius(*a);
  return std::nullopt;
}

ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner) {
  using Rep = ConformalMap::Rep;
  const Interval domain = inner.domain_;
  const auto* oa = std::get_if<AffineCoeffs>(&outer.rep_);
  const auto* ia = std::get_if<AffineCoeffs>(&inner.rep_);
  if (oa && ia) return ConformalMap(Rep{AffineCoeffs{oa->slope * ia->slope, oa->slope * ia->intercept + oa->intercept}}, domain);
  const auto om = outer.mobius_coeffs();
  const auto im = inner.mobius_coeffs();
  if (om && im) {
    const MobiusCoeffs m = multiply(*om, *im);
    if (m.c == 0.0) return ConformalMap(Rep{AffineCoeffs{m.a / m.d, m.b / m.d}}, domain);
    return ConformalMap(Rep{m}, domain);
  }
  ConformalMap::Chain chain = ConformalMap::as_chain(outer.rep_);
  const ConformalMap::Chain tail = ConformalMap::as_chain(inner.rep_);
  chain.factors.insert(chain.factors.end(), tail.factors.begin(), tail.factors.end());
  return ConformalMap(Rep{std::move(chain)}, domain);
}

}  // namespace ruelle
