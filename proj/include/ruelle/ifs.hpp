#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ruelle/interval.hpp"

namespace ruelle {

struct AffineCoeffs {
  double slope = 1.0;
  double intercept = 0.0;
};

/// x -> (a x + b) / (c x + d).
struct MobiusCoeffs {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;
  /// ad - bc carried through products, so derivatives of long compositions keep
  /// their relative accuracy. NaN means "compute from the entries".
  double det = std::numeric_limits<double>::quiet_NaN();
};

/// A strictly monotone C^1 contraction of an interval with exact derivative access.
///
/// Affine and Mobius maps are kept in closed form and compose in closed form.
/// Anything else is a chain of opaque factors evaluated lazily; its derivative
/// bounds are products of per-factor bounds over the nested image intervals.
class ConformalMap {
 public:
  using Fn = std::function<double(double)>;
  using RangeFn = std::function<Interval(const Interval&)>;

  ConformalMap();  // identity on [0, 1]

  static ConformalMap identity(Interval domain);
  static ConformalMap affine(double slope, double intercept, Interval domain);
  static ConformalMap mobius(MobiusCoeffs m, Interval domain);
  /// Continued-fraction digit map x -> 1 / (digit + x).
  static ConformalMap gauss_digit(std::uint32_t digit, Interval domain);
  /// `abs_deriv_range` must return an enclosure of |s'| over its argument.
  /// `monotone` certifies that images of intervals are spanned by endpoint images.
  static ConformalMap generic(Fn eval, Fn deriv, RangeFn abs_deriv_range, Interval domain, bool monotone);

  double operator()(double x) const;
  double derivative(double x) const;

  /// Image enclosure of `iv`; exact when `monotone_certified()`.
  Interval image(const Interval& iv) const;
  /// |s(iv.hi) - s(iv.lo)| without cancellation for closed-form maps.
  double image_width(const Interval& iv) const;
  /// Enclosure of {|s'(x)| : x in iv}.
  Interval abs_derivative_range(const Interval& iv) const;

  bool monotone_certified() const;
  const Interval& domain() const { return domain_; }
  double r_inf() const { return bounds_.lo; }
  double R_sup() const { return bounds_.hi; }
  bool contractive() const { return bounds_.hi < 1.0; }

  std::optional<AffineCoeffs> affine_coeffs() const;
  std::optional<MobiusCoeffs> mobius_coeffs() const;

  /// outer ∘ inner, on the domain of `inner`.
  friend ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner);

 private:
  struct Leaf {
    Fn eval;
    Fn deriv;
    RangeFn range;
    bool monotone = false;
  };
  /// Factors listed outermost first.
  struct Chain {
    std::vector<std::shared_ptr<const Leaf>> factors;
  };
  using Rep = std::variant<AffineCoeffs, MobiusCoeffs, Chain>;

  ConformalMap(Rep rep, Interval domain);
  static Chain as_chain(const Rep& rep);
  static Interval leaf_image(const Leaf& f, const Interval& cur);

  Rep rep_;
  Interval domain_;
  Interval bounds_;  // [r_inf, R_sup] over the domain
};

/// Finite symbol string; symbols are 1-based map indices.
struct Word {
  std::vector<std::uint32_t> symbols;

  Word() = default;
  Word(std::initializer_list<std::uint32_t> s) : symbols(s) {}
  explicit Word(std::vector<std::uint32_t> s) : symbols(std::move(s)) {}
  static Word repeated(std::uint32_t symbol, std::size_t length) {
    return Word(std::vector<std::uint32_t>(length, symbol));
  }

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  std::string to_string() const;  // "1.2.2"; empty word is "e"
  bool operator==(const Word&) const = default;
};

enum class FamilyKind { affine_geometric, gauss_digit_set, explicit_finite_list, custom_parametric };
enum class TailLaw { finite, geometric, power_law, unknown };

const char* to_string(FamilyKind kind) noexcept;
const char* to_string(TailLaw law) noexcept;

/// Modulus of continuity bound for log|s_j'| uniform in j: alpha(t), plus a
/// Lipschitz constant L with alpha(t) <= L t used for the geometric remainder of Phi.
struct DiniModulus {
  std::function<double(double)> alpha;
  double lipschitz = 0.0;
};

/// Countable family {s_j}, j >= 1, on a common domain interval X.
class IFSFamily {
 public:
  struct Spec {
    FamilyKind kind = FamilyKind::explicit_finite_list;
    Interval domain{0.0, 1.0};
    double margin = 0.0;  // X0 = X enlarged by this amount
    std::optional<std::size_t> size;  // nullopt: infinite
    std::function<ConformalMap(std::size_t)> generator;  // 1-based
    TailLaw tail_law = TailLaw::unknown;
    double tail_parameter = 0.0;  // geometric: q with R_j <= C q^j; power law: beta with R_j ~ j^-beta
    /// Upper bound on sum_{j>N} R_j^t; +inf where divergent.
    std::function<double(double, std::size_t)> tail_sup;
    std::optional<DiniModulus> dini;
    /// Closed-form bound on R_w / r_w over all words (e.g. Mobius families).
    std::optional<double> distortion_closed_form;
    /// lim_{j->inf} s_j(x) for infinite families, when it exists.
    std::optional<double> accumulation_point;
    /// sup_j R_j; computed from the first maps when absent.
    std::optional<double> contraction;
    bool all_affine = false;
    std::string description;
  };

  explicit IFSFamily(Spec spec);

  FamilyKind kind() const { return spec_.kind; }
  const Interval& domain() const { return spec_.domain; }
  Interval enlarged_domain() const { return spec_.domain.enlarged(spec_.margin); }
  double margin() const { return spec_.margin; }
  bool finite() const { return spec_.size.has_value(); }
  std::optional<std::size_t> size() const { return spec_.size; }
  /// Number of maps actually used at truncation N.
  std::size_t effective_truncation(std::size_t n) const;

  /// Map s_j, j >= 1. Throws index_out_of_family.
  ConformalMap map_at(std::size_t j) const;

  double contraction() const { return contraction_; }
  TailLaw tail_law() const { return spec_.tail_law; }
  double tail_parameter() const { return spec_.tail_parameter; }
  /// Upper bound on sum_{j>N} R_j^t (0 for finite families with N >= size).
  double tail_sup(double t, std::size_t n) const;
  const std::optional<DiniModulus>& dini() const { return spec_.dini; }
  const std::optional<double>& distortion_closed_form() const { return spec_.distortion_closed_form; }
  const std::optional<double>& accumulation_point() const { return spec_.accumulation_point; }
  bool all_affine() const { return spec_.all_affine; }
  const std::string& description() const { return spec_.description; }

  /// Flagged violations of contractivity/invariance found at construction.
  const std::vector<std::string>& flags() const { return flags_; }
  bool contractive() const { return contraction_ < 1.0; }

  /// Convex hull of the limit set (outer approximation, forward invariant).
  const Interval& attractor_hull() const { return hull_; }

  /// Maps s_1..s_{effective_truncation(n)}, cached per call.
  std::vector<ConformalMap> maps(std::size_t n) const;

 private:
  Spec spec_;
  double contraction_ = 0.0;
  std::vector<std::string> flags_;
  Interval hull_;
};

// Family constructors ---------------------------------------------------------

/// s_j(x) = q^j x + p^j - q^j, j >= 1 (the images of [0,1] are [p^j - q^j, p^j]).
IFSFamily make_affine_geometric(double q, double p, Interval domain, double margin = 0.0);
/// s_d(x) = 1/(d + x) for the listed digits.
IFSFamily make_gauss_digits(std::vector<std::uint32_t> digits, Interval domain, double margin = 0.0);
/// s_j(x) = 1/(m - 1 + j + x) for every j >= 1 (all digits >= m).
IFSFamily make_gauss_infinite(std::uint32_t min_digit, Interval domain, double margin = 0.0);
/// Finite list of affine maps (slope, intercept).
IFSFamily make_explicit_affine(std::vector<AffineCoeffs> maps, Interval domain, double margin = 0.0);
/// Affine maps with ratios r_j = scale * j^-beta packed left to right from 0.
IFSFamily make_power_law(double scale, double beta, Interval domain, double margin = 0.0);

// Word operations -------------------------------------------------------------

/// s_{u_1} ∘ ... ∘ s_{u_k}; the empty word is the identity.
ConformalMap compose_word(const IFSFamily& family, const Word& u);

struct ContractionBounds {
  double r = 0.0;  // inf_X |s_u'|
  double R = 0.0;  // sup_X |s_u'|
};
ContractionBounds contraction_bounds(const IFSFamily& family, const Word& u);

struct CodingPoint {
  double point = 0.0;
  double error_bound = 0.0;  // min(s^k, R_u) diam(X)
};
CodingPoint coding_map(const IFSFamily& family, const Word& u, double base);

struct DistortionData {
  double c1 = 1.0;
  double phi_at_1 = 0.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double delta = 0.0;
  std::string method;  // "affine", "dini", "closed-form"
  /// max R_u / r_u over the verification words (1 if none were checked).
  double max_observed_ratio = 1.0;
};

/// Bounded-distortion constants. verify_depth > 0 also brute-forces R_u / r_u
/// over all words of that length or less with symbols <= truncation.
DistortionData estimate_distortion(const IFSFamily& family, std::size_t truncation, std::size_t verify_depth = 0);

/// Phi(t) = sum_{i>=0} alpha(s^i t) with the geometric remainder included; +inf when s >= 1.
double phi_bound(const DiniModulus& modulus, double s, double t);

}  // namespace ruelle
