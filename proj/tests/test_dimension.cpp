#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ruelle/dimension.hpp"
#include "ruelle/error.hpp"
#include "oracles.hpp"

using namespace ruelle;

namespace {

IFSFamily example() { return make_affine_geometric(0.25, 0.5, {0.0, 1.0}); }
IFSFamily cantor() { return make_explicit_affine({{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}}, {0.0, 1.0}); }
IFSFamily e2() { return make_gauss_digits({1, 2}, {0.25, 0.85}); }
const double kLog23 = std::log(2.0) / std::log(3.0);

}  // namespace

TEST_CASE("finiteness exponent") {
  CHECK(finiteness_exponent(example()) == 0.0);
  CHECK(finiteness_exponent(cantor()) == 0.0);
  CHECK(finiteness_exponent(make_power_law(0.3, 2.0, {0.0, 1.0})) == doctest::Approx(0.5));
  CHECK(finiteness_exponent(make_gauss_infinite(1, {0.0, 1.0})) == doctest::Approx(0.5));
  IFSFamily::Spec spec;
  spec.kind = FamilyKind::custom_parametric;
  spec.tail_law = TailLaw::unknown;
  spec.generator = [](std::size_t j) { return ConformalMap::affine(std::pow(0.5, j + 1), 0.0, {0.0, 1.0}); };
  spec.tail_sup = [](double, std::size_t) { return 0.0; };
  spec.all_affine = true;
  try {
    finiteness_exponent(IFSFamily(spec));
    FAIL("expected theta-unknown");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::theta_unknown);
  }
}

TEST_CASE("pressure: cantor closed form") {
  for (double s : {0.1, 0.5, 0.9, 1.7}) {
    const PressurePoint p = pressure(cantor(), s, 8, 2);
    const double exact = std::log(2.0) - s * std::log(3.0);
    CHECK(std::abs(p.log_rho - exact) < 1e-12);
    CHECK(std::abs(p.lower - exact) < 1e-12);
    CHECK(std::abs(p.upper - exact) < 1e-12);
  }
}

TEST_CASE("pressure: example") {
  const PressurePoint half = pressure(example(), 0.5, 10, 60);
  CHECK(std::abs(half.log_rho) < 1e-9);
  CHECK(half.lower <= 1e-12);
  CHECK(half.upper >= -1e-12);
  const PressurePoint one = pressure(example(), 1.0, 10, 60);
  const double tail = example().tail_sup(1.0, 60);
  CHECK(std::abs(one.log_rho - std::log(1.0 / 3)) <= 3 * tail + 1e-12);
  CHECK(std::abs(pressure(example(), 0.25, 10, 60).log_rho - std::log(std::sqrt(0.5) / (1 - std::sqrt(0.5)))) < 1e-6);
}

TEST_CASE("pressure below theta is divergent") {
  const IFSFamily g = make_gauss_infinite(1, {0.0, 1.0});
  try {
    pressure(g, 0.5, 3, 50);
    FAIL("expected summability");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::summability);
  }
}

TEST_CASE("pressure brackets: e2") {
  const double c1 = estimate_distortion(e2(), 2).c1;
  for (double s : {0.3, 0.53, 0.8}) {
    double prev_lo = -1e300, prev_hi = 1e300;
    for (std::size_t n : {4, 8, 12}) {
      const PressurePoint p = pressure(e2(), s, n, 2);
      CHECK(p.lower <= p.upper);
      CHECK(p.lower <= p.log_rho + 1e-12);
      CHECK(p.log_rho <= p.upper + std::log(c1) / n + 1e-12);
      CHECK(p.upper - p.lower <= std::log(c1) / n + 1e-12);
      // Nested in n up to the c1 slack.
      CHECK(p.upper <= prev_hi + std::log(c1) / n);
      CHECK(p.lower >= prev_lo - std::log(c1) / n);
      prev_lo = p.lower;
      prev_hi = p.upper;
    }
  }
}

TEST_CASE("cylinder sums: pruning and budget keep the upper sum an upper bound") {
  const IFSFamily g = make_gauss_infinite(2, {0.0, 1.0});
  PressureOptions loose;
  loose.word_budget = 2000;
  PressureOptions tight;
  const CylinderSums a = cylinder_sums(g, 1.0, 3, 40, tight);
  const CylinderSums b = cylinder_sums(g, 1.0, 3, 40, loose);
  CHECK(b.partial);
  CHECK(b.upper_sum >= a.upper_sum * (1 - 1e-12));
  CHECK(b.lower_sum <= a.lower_sum * (1 + 1e-12));
  CHECK(a.upper_sum >= a.lower_sum);
}

TEST_CASE("hausdorff dimension: reference values") {
  DimensionOptions o;
  o.tol = 1e-9;
  const DimensionResult ex = hausdorff_dimension(example(), 12, 60, o);
  CHECK(ex.certified);
  CHECK(std::abs(ex.a - 0.5) <= 1e-8);
  CHECK(ex.theta < ex.a_lo);
  CHECK(ex.a_lo <= ex.a);
  CHECK(ex.a <= ex.a_hi);
  CHECK(ex.at_lo.lower > 0.0);
  CHECK(ex.at_hi.upper < 0.0);

  o.tol = 1e-11;
  const DimensionResult c = hausdorff_dimension(cantor(), 10, 2, o);
  CHECK(c.certified);
  CHECK(std::abs(c.a - kLog23) <= 1e-10);
  CHECK(c.a_lo <= kLog23);
  CHECK(kLog23 <= c.a_hi);
}

TEST_CASE("hausdorff dimension: e2 bracket against the cylinder-root oracle") {
  DimensionOptions o;
  o.tol = 1e-8;
  const DimensionResult r = hausdorff_dimension(e2(), 12, 2, o);
  const Interval deep = oracle::cylinder_root_oracle(12, 0.25, 0.85);
  CHECK(r.a_lo <= deep.hi);
  CHECK(deep.lo <= r.a_hi);
  CHECK(r.a_lo <= r.a);
  CHECK(r.a <= r.a_hi);
  CHECK(r.at_lo.lower > 0.0);
  CHECK(r.at_hi.upper < 0.0);
  CHECK(deep.contains(r.a));
  // Deeper oracles nest.
  const Interval o8 = oracle::cylinder_root_oracle(8, 0.25, 0.85);
  CHECK(o8.contains(deep));
}

TEST_CASE("no root in range") {
  const IFSFamily g = make_gauss_infinite(1, {0.0, 1.0});
  try {
    hausdorff_dimension(g, 4, 200);
    FAIL("expected no-root-in-range");
  } catch (const NoRootError& e) {
    CHECK(e.code() == ErrorCode::no_root_in_range);
    REQUIRE(e.psi_samples().size() == 2);
    CHECK(e.psi_samples()[1].second >= 1.0);
  }
}

TEST_CASE("moran root") {
  CHECK(std::abs(moran_root(std::vector<double>{1.0 / 3, 1.0 / 3}).s - kLog23) < 1e-14);
  std::vector<double> geo;
  for (int j = 1; j <= 40; ++j) geo.push_back(std::pow(0.25, j));
  CHECK(std::abs(moran_root(geo).s - 0.5) < 1e-10);
  const MoranResult one = moran_root(std::vector<double>{0.5});
  CHECK(one.degenerate);
  CHECK(one.s == 0.0);
  CHECK_THROWS_AS(moran_root(std::vector<double>{0.5, 1.2}), Error);
  CHECK_THROWS_AS(moran_root(std::vector<double>{}), Error);
}

TEST_CASE("dimension agrees with the moran oracle") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ratio(0.1, 0.6);
  for (int t = 0; t < 6; ++t) {
    const std::size_t n = 2 + rng() % 5;
    std::vector<double> r(n);
    for (double& x : r) x = ratio(rng);
    std::vector<AffineCoeffs> maps;
    for (std::size_t j = 0; j < n; ++j) maps.push_back({r[j], (1 - r[j]) * j / (n - 1.0)});
    DimensionOptions o;
    o.tol = 1e-9;
    const DimensionResult d = hausdorff_dimension(make_explicit_affine(maps, {0.0, 1.0}), 8, n, o);
    CHECK(std::abs(d.a - oracle::moran_oracle(r)) < 1e-8);
  }
}

TEST_CASE("convexity diagnostics") {
  const std::vector<double> grid{0.2, 0.4, 0.6, 0.8, 1.0};
  const ConvexityReport c = convexity_check(cantor(), grid, 6, 2);
  CHECK(c.convex);
  CHECK(c.strictly_decreasing);
  CHECK(c.defects.empty());
  const std::vector<double> g3{0.3, 0.5, 0.7};
  const ConvexityReport e = convexity_check(example(), g3, 8, 60);
  CHECK(e.convex);
  CHECK(e.f[1] <= 0.5 * (e.f[0] + e.f[2]));
  CHECK(e.strictly_decreasing);
  CHECK(pressure(example(), 0.5, 8, 60).log_rho > pressure(example(), 0.6, 8, 60).log_rho);
}

TEST_CASE("pressure csv") {
  std::vector<std::optional<PressurePoint>> rows{std::nullopt, pressure(cantor(), 0.5, 4, 2)};
  const std::vector<double> s{0.0, 0.5};
  std::ostringstream os;
  write_pressure_csv(rows, s, os);
  const std::string out = os.str();
  CHECK(out.rfind("s,lower,log_rho,upper\n", 0) == 0);
  CHECK(out.find("divergent") != std::string::npos);
}
