#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/transfer.hpp"

using namespace ruelle;

namespace {

IFSFamily example() { return make_affine_geometric(0.25, 0.5, {0.0, 1.0}); }
IFSFamily cantor() { return make_explicit_affine({{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}}, {0.0, 1.0}); }
IFSFamily e2() { return make_gauss_digits({1, 2}, {0.25, 0.85}); }
IFSFamily gauss() { return make_gauss_infinite(1, {0.0, 1.0}); }
const double kLog23 = std::log(2.0) / std::log(3.0);

double pairing(std::span<const double> a, std::span<const double> b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("apply: example at s = 1/2 sums the geometric series") {
  const IFSFamily f = example();
  const GridFunction one = GridFunction::constant(UniformGrid::over(f.attractor_hull(), 64), 1.0);
  const ApplyResult r = apply(f, Potential::geometric(0.5), one, 40);
  for (double v : r.value.values()) CHECK(v == doctest::Approx(1.0 - std::ldexp(1.0, -40)).epsilon(1e-15));
  CHECK(r.tail_bound == doctest::Approx(std::ldexp(1.0, -40)).epsilon(1e-12));

  const GridFunction zero = GridFunction::constant(one.grid(), 0.0);
  const ApplyResult z = apply(cantor(), Potential::geometric(0.5), zero, 2);
  for (double v : z.value.values()) CHECK(v == 0.0);
  CHECK(z.tail_bound == 0.0);
}

TEST_CASE("apply: gauss telescoping identity") {
  const IFSFamily g = gauss();
  const UniformGrid grid{0.0, 1.0, 2048};
  const GridFunction f = GridFunction::sample(grid, [](double x) { return 1.0 / (1.0 + x); });
  const std::size_t n = 2000;
  const ApplyResult plain = apply(g, Potential::geometric(1.0), f, n);
  const ApplyResult closed = apply(g, Potential::geometric(1.0), f, n, TailModel::integral);
  const double interp = 2.0 * std::pow(grid.spacing(), 2) / 8.0 * 2.0;
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double x = grid.node(i);
    // Partial telescoping sum: sum_{j<=n} 1/((j+x)(j+x+1)) = 1/(1+x) - 1/(n+1+x).
    CHECK(std::abs(plain.value.values()[i] - (1.0 / (1 + x) - 1.0 / (n + 1 + x))) <= interp);
    CHECK(std::abs(closed.value.values()[i] - 1.0 / (1 + x)) <= interp + 1e-9);
  }
  CHECK(plain.tail_bound > 0.0);
}

TEST_CASE("summability error below theta") {
  const IFSFamily g = gauss();
  const GridFunction one = GridFunction::constant(UniformGrid{0.0, 1.0, 16}, 1.0);
  try {
    apply(g, Potential::geometric(0.5), one, 100);
    FAIL("expected summability error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::summability);
  }
}

TEST_CASE("spectral radius oracles") {
  const PerronData c = spectral_radius(cantor(), Potential::geometric(kLog23), 2, 256, 1e-12, 1000);
  CHECK(std::abs(c.rho - 1.0) <= 1e-10);
  const PerronData c1 = spectral_radius(cantor(), Potential::geometric(1.0), 2, 256, 1e-12, 1000);
  CHECK(std::abs(c1.rho - 2.0 / 3) <= 1e-10);
  const PerronData e = spectral_radius(example(), Potential::geometric(0.5), 60, 512, 1e-12, 1000);
  CHECK(std::abs(e.rho - 1.0) <= 1e-9);
  CHECK(e.rho_bracket_with_tail.contains(1.0));
  CHECK(e.rho_bracket.lo <= e.rho);
  CHECK(e.rho <= e.rho_bracket.hi);
}

TEST_CASE("non-convergence carries the last bracket") {
  const DiscreteOperator op(e2(), Potential::geometric(0.5), UniformGrid::over(e2().attractor_hull(), 64), {2});
  try {
    spectral_radius(op, 1e-14, 2);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.lower() <= e.upper());
    CHECK(e.iterations() == 2);
    CHECK(e.code() == ErrorCode::non_convergence);
  }
}

TEST_CASE("perron pair: constant-derivative families have constant h") {
  for (const IFSFamily& f : {cantor(), example()}) {
    PerronOptions o;
    o.grid = 128;
    o.op.truncation = 60;
    const PerronData pd = perron_pair(f, Potential::geometric(0.7), o);
    REQUIRE(pd.h);
    CHECK((pd.h->max() - pd.h->min()) / pd.h->max() <= 1e-12);
    CHECK(pd.pairing == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pd.mu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("perron pair: gauss eigenfunction 1/(1+x)") {
  PerronOptions o;
  o.grid = 1024;
  o.op.truncation = 1000;
  o.op.tail_model = TailModel::integral;
  const PerronData pd = perron_pair(gauss(), Potential::geometric(1.0), o);
  const double c = pd.h->values()[0];
  for (std::size_t i = 0; i < pd.grid.size; ++i) {
    const double x = pd.grid.node(i);
    CHECK(std::abs(pd.h->values()[i] * (1 + x) / c - 1.0) < 1e-6);
  }
  for (double v : pd.h->values()) CHECK(v > 0.0);
}

TEST_CASE("perron pair: cantor eigenmeasure splits evenly") {
  PerronOptions o;
  o.grid = 729;
  o.op.truncation = 2;
  const PerronData pd = perron_pair(cantor(), Potential::geometric(kLog23), o);
  auto left = [](double x) { return x <= 1.0 / 3 ? 1.0 : (x >= 2.0 / 3 ? 0.0 : 2.0 - 3.0 * x); };
  CHECK(pd.mu.integrate(left) == doctest::Approx(0.5).epsilon(1e-6));
  auto left_left = [](double x) { return x <= 1.0 / 9 ? 1.0 : (x >= 2.0 / 9 ? 0.0 : 2.0 - 9.0 * x); };
  CHECK(pd.mu.integrate(left_left) == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("dual apply") {
  const IFSFamily halves = make_explicit_affine({{0.5, 0.0}, {0.5, 0.5}}, {0.0, 1.0});
  const AtomicMeasure one({{0.3, 2.0}});
  const AtomicMeasure out = dual_apply(halves, Potential::geometric(1.0), one, 2);
  REQUIRE(out.atoms().size() == 2);
  CHECK(out.atoms()[0].position == doctest::Approx(0.15));
  CHECK(out.atoms()[1].position == doctest::Approx(0.65));
  CHECK(out.atoms()[0].mass == doctest::Approx(1.0));
  CHECK(out.atoms()[1].mass == doctest::Approx(1.0));

  // Finite-sum duality on the Cantor pair, against hand-written maps.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<Atom> atoms;
    for (int k = 0; k < 10; ++k) atoms.push_back({u(rng), u(rng)});
    const AtomicMeasure mu(atoms);
    const double a = u(rng), b = u(rng), c = u(rng);
    auto f = [&](double x) { return a + b * std::sin(7 * x) + c * x * x; };
    const double s = 0.4;
    const double lhs = dual_apply(cantor(), Potential::geometric(s), mu, 2).integrate(f);
    double rhs = 0.0;
    for (const Atom& at : atoms) rhs += at.mass * std::pow(1.0 / 3, s) * (f(at.position / 3) + f(at.position / 3 + 2.0 / 3));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }

  // Example at s = 1/2: total mass grows by T_s 1 = 1 - 2^-40 at every atom.
  const AtomicMeasure xi = AtomicMeasure::uniform(example().attractor_hull(), 100);
  const AtomicMeasure step = dual_apply(example(), Potential::geometric(0.5), xi, 40);
  CHECK(step.total_mass() == doctest::Approx(1.0 - std::ldexp(1.0, -40)).epsilon(1e-15));
}

TEST_CASE("binned duality is exact transposition") {
  const IFSFamily f = e2();
  const DiscreteOperator op(f, Potential::geometric(0.53), UniformGrid::over(f.attractor_hull(), 200), {2});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> m(200), g(200);
    for (auto& v : m) v = u(rng);
    for (auto& v : g) v = u(rng) - 0.5;
    const double lhs = pairing(op.apply_transpose(m), g);
    const double rhs = pairing(m, op.apply(g));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("normalized operator") {
  const IFSFamily f = e2();
  PerronOptions o;
  o.grid = 512;
  o.op.truncation = 2;
  const DiscreteOperator op(f, Potential::geometric(0.53), UniformGrid::over(f.attractor_hull(), o.grid), o.op);
  const PerronData pd = perron_pair(op, o);
  const GridFunction one = GridFunction::constant(op.grid(), 1.0);
  const GridFunction p1 = normalized_operator(pd, op, one);
  for (double v : p1.values()) CHECK(std::abs(v - 1.0) < 1e-6);

  std::vector<double> inv(pd.h->values().size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / pd.h->values()[i];
  GridFunction g(op.grid(), inv);
  for (int n = 0; n < 60; ++n) g = normalized_operator(pd, op, g);
  // P^n f tends to <mu, h f>, so P^n(1/h) tends to the mass of mu.
  const double target = pd.mu.total_mass();
  for (double v : g.values()) CHECK(v == doctest::Approx(target).epsilon(1e-6));

  // Affine families: P = T / rho.
  const IFSFamily c = cantor();
  const DiscreteOperator cop(c, Potential::geometric(0.5), UniformGrid::over(c.attractor_hull(), 81), {2});
  PerronOptions co;
  co.grid = 81;
  const PerronData cpd = perron_pair(cop, co);
  const GridFunction x = GridFunction::sample(cop.grid(), [](double t) { return t * t; });
  const GridFunction px = normalized_operator(cpd, cop, x);
  const std::vector<double> tx = cop.apply(x.values());
  for (std::size_t i = 0; i < tx.size(); ++i) CHECK(px.values()[i] == doctest::Approx(tx[i] / cpd.rho).epsilon(1e-12));
}

TEST_CASE("uniform bounds and eigenpair uniqueness") {
  const IFSFamily f = e2();
  PerronOptions o;
  o.grid = 512;
  o.op.truncation = 2;
  const DiscreteOperator op(f, Potential::geometric(0.45), UniformGrid::over(f.attractor_hull(), o.grid), o.op);
  const PerronData pd = perron_pair(op, o);
  const double hmin = pd.h->min(), hmax = pd.h->max();
  const double A = hmin / hmax, B = hmax / hmin;
  std::vector<double> u(o.grid, 1.0);
  for (int n = 1; n <= 20; ++n) {
    u = op.apply(u);
    for (double& v : u) v /= pd.rho;
    for (double v : u) {
      CHECK(v >= A * (1 - 1e-12));
      CHECK(v <= B * (1 + 1e-12));
    }
  }
  PerronOptions alt = o;
  alt.start_function = [](double x) { return 1.0 + 3.0 * x * x; };
  const PerronData pd2 = perron_pair(op, alt);
  double dist = 0;
  for (std::size_t i = 0; i < o.grid; ++i) dist = std::max(dist, std::abs(pd.h->values()[i] - pd2.h->values()[i]));
  CHECK(dist < 5 * o.h_tol);
}

TEST_CASE("collatz-wielandt sandwich through the iteration") {
  const PerronData pd = spectral_radius(e2(), Potential::geometric(0.6), 2, 256, 1e-12, 1000);
  for (const IterationRecord& r : pd.trace) {
    CHECK(r.rho_lower <= pd.rho * (1 + 1e-14));
    CHECK(r.rho_upper >= pd.rho * (1 - 1e-14));
  }
}

TEST_CASE("dini diagnostics") {
  const std::vector<double> ts{0.1, 0.3, 0.6, 1.0};
  const Potential constant = Potential::custom([](std::size_t, double) { return 0.5; },
                                               [](std::size_t) { return 0.0; }, DiniModulus{[](double) { return 0.0; }, 0.0});
  for (const DiniRow& r : dini_diagnostics(constant, e2(), ts)) {
    CHECK(r.alpha == 0.0);
    CHECK(r.phi == 0.0);
  }
  for (const DiniRow& r : dini_diagnostics(Potential::geometric(1.0), example(), ts)) {
    CHECK(r.alpha == 0.0);
    CHECK(r.phi == 0.0);
  }
  const auto rows = dini_diagnostics(Potential::geometric(1.0), e2(), ts);
  for (const DiniRow& r : rows) {
    CHECK_FALSE(r.divergent);
    CHECK(std::isfinite(r.phi));
    CHECK(r.phi >= r.alpha);
  }
  // log(1/(d+x)^2) has Lipschitz constant 2/(1+0.25) on X, so Phi(t) <= 1.6 t / (1 - s).
  const double s = e2().contraction();
  CHECK(rows[2].phi <= 1.6 * 0.6 / (1 - s) + 1e-12);
}

TEST_CASE("trace csv") {
  const PerronData pd = spectral_radius(cantor(), Potential::geometric(0.5), 2, 32, 1e-12, 100);
  std::ostringstream os;
  write_trace_csv(pd.trace, os);
  CHECK(os.str().rfind("iteration,rho_lower,rho_upper,sup_residual\n", 0) == 0);
}
