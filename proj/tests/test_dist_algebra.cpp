#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "distbeam/algebra_check.hpp"
#include "distbeam/distribution.hpp"
#include "distbeam/errors.hpp"

using namespace distbeam;

TEST_CASE("smooth expressions differentiate and simplify") {
  const SmoothExpr p = SmoothExpr::polynomial({1.0, 2.0, 3.0});
  CHECK(p(2.0) == doctest::Approx(17.0));
  CHECK(p.derivative()(2.0) == doctest::Approx(14.0));
  CHECK(p.derivative(3).is_zero());
  CHECK(p.is_polynomial());

  const SmoothExpr s = SmoothExpr::sin(3.0);
  CHECK(s.derivative(2)(0.4) == doctest::Approx(-9.0 * std::sin(1.2)));
  CHECK(equivalent(s * s + SmoothExpr::cos(3.0) * SmoothExpr::cos(3.0), SmoothExpr{1.0}));
  CHECK((s - s).is_zero());

  const SmoothExpr e = SmoothExpr::exp(2.0) * SmoothExpr::x();
  CHECK(e.derivative()(0.5) == doctest::Approx(std::exp(1.0) * 2.0));
  CHECK(e.derivative_at(0.5, 2) == doctest::Approx(6.0 * std::exp(1.0)));

  // Negative rates fold into the sign of odd atoms.
  CHECK(equivalent(SmoothExpr::sin(-2.0), -SmoothExpr::sin(2.0)));
  CHECK(SmoothExpr::sinh(-1.0) == -SmoothExpr::sinh(1.0));
}

TEST_CASE("canonical form merges duplicates and drops removable breakpoints") {
  RawDistribution raw{{0.0, 1.0},
                      {SmoothExpr{2.0}, SmoothExpr{2.0}, SmoothExpr::x()},
                      {DeltaTerm{1.0, 1, 0.5}, DeltaTerm{1.0, 1, 0.25}}};
  const Distribution f = normalize(raw);
  REQUIRE(f.breakpoints().size() == 1);
  CHECK(f.breakpoints()[0] == 1.0);
  CHECK(f.delta_coeff(1.0, 1) == doctest::Approx(0.75));

  // A delta off the breakpoint set splits the smooth piece it lands in.
  const Distribution g = normalize(RawDistribution{{}, {SmoothExpr::x()}, {DeltaTerm{0.3, 0, 1.0}}});
  CHECK(g.breakpoints() == std::vector<double>{0.3});
  CHECK(g.pieces().size() == 2);

  CHECK(Distribution{}.is_zero());
  CHECK((Distribution::heaviside(0.0) - Distribution::heaviside(0.0)).is_zero());
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(normalize(RawDistribution{{0.0}, {SmoothExpr{}}, {}}), InvalidInput);
  CHECK_THROWS_AS(normalize(RawDistribution{{1.0, 0.0}, {0.0, 0.0, 0.0}, {}}), InvalidInput);
  CHECK_THROWS_AS(Distribution::delta(0.0, -1), InvalidInput);
  CHECK_THROWS_AS(Distribution::delta(0.0, 9), OrderOverflow);
  CHECK_THROWS_AS(derivative(Distribution::delta(0.0, 8)), OrderOverflow);
  CHECK_NOTHROW(Distribution::delta(0.0, 8));
}

TEST_CASE("distributional derivative adds jump deltas") {
  const Distribution h = Distribution::heaviside(0.5);
  const Distribution dh = derivative(h);
  CHECK(coefficient_distance(dh, Distribution::delta(0.5)) == 0.0);

  // |x| has derivative sign(x) and second derivative 2 delta.
  const Distribution absx = Distribution::piecewise(0.0, -SmoothExpr::x(), SmoothExpr::x());
  const Distribution d2 = derivative(absx, 2);
  CHECK(d2.delta_coeff(0.0, 0) == doctest::Approx(2.0));
  CHECK(d2.pieces().size() == 2);
  CHECK(d2.pieces()[0].is_zero());

  CHECK(order(h) == 0);
  CHECK(order(dh) == 1);
  CHECK(order(derivative(dh, 2)) == 3);
  CHECK(sing_supp(dh) == std::vector<double>{0.5});
  CHECK(derivative(h, 0).breakpoints() == h.breakpoints());
}

TEST_CASE("smooth multiplier expands delta derivatives") {
  // x delta' = -delta, x^2 delta'' = 2 delta
  const Distribution d1 = dual_mul_smooth(SmoothExpr::x(), Distribution::delta(0.0, 1));
  CHECK(d1.delta_coeff(0.0, 0) == doctest::Approx(-1.0));
  CHECK(d1.delta_coeff(0.0, 1) == 0.0);
  const Distribution d2 = dual_mul_smooth(SmoothExpr::polynomial({0, 0, 1}), Distribution::delta(0.0, 2));
  CHECK(d2.delta_coeff(0.0, 0) == doctest::Approx(2.0));
  CHECK(d2.delta_coeff(0.0, 1) == 0.0);
  CHECK(d2.delta_coeff(0.0, 2) == 0.0);

  // g delta' = g(xi) delta' - g'(xi) delta
  const SmoothExpr g = SmoothExpr::sin(1.0);
  const Distribution d3 = dual_mul_smooth(g, Distribution::delta(0.7, 1));
  CHECK(d3.delta_coeff(0.7, 1) == doctest::Approx(std::sin(0.7)));
  CHECK(d3.delta_coeff(0.7, 0) == doctest::Approx(-std::cos(0.7)));
}

TEST_CASE("product identities with Heaviside and delta") {
  const double x0 = 0.25;
  const Distribution hl = Distribution::heaviside_left(x0);
  const Distribution hr = Distribution::heaviside(x0);
  for (int i = 0; i <= 3; ++i) {
    const Distribution d = Distribution::delta(x0, i);
    CHECK(coefficient_distance(star(hl, d), d) == 0.0);
    CHECK(star(hr, d).is_zero());
    CHECK(coefficient_distance(star(d, hr), d) == 0.0);
    CHECK(star(d, hl).is_zero());
    CHECK(star(d, Distribution::delta(x0, 3 - i)).is_zero());
  }
  const Distribution h = Distribution::heaviside(0.0);
  const Distribution hd = h + Distribution::delta(0.0);
  CHECK(coefficient_distance(star(h, hd), h) == 0.0);
  CHECK(coefficient_distance(star(hd, h), hd) == 0.0);
}

TEST_CASE("product is non-commutative only through singular terms") {
  const Distribution f = Distribution::piecewise(0.0, SmoothExpr{1.0}, SmoothExpr{3.0});
  const Distribution d = Distribution::delta(0.0);
  CHECK(star(f, d).delta_coeff(0.0, 0) == doctest::Approx(1.0));
  CHECK(star(d, f).delta_coeff(0.0, 0) == doctest::Approx(3.0));

  const Distribution p{SmoothExpr::polynomial({1.0, 1.0})};
  CHECK(coefficient_distance(star(p, f), star(f, p)) == 0.0);
  CHECK(coefficient_distance(star(p, d), star(d, p)) == 0.0);
}

TEST_CASE("eval_limits and piece lookup") {
  const Distribution f = Distribution::piecewise(1.0, SmoothExpr::x(), SmoothExpr{5.0});
  const auto [l, r] = eval_limits(f, 1.0);
  CHECK(l == doctest::Approx(1.0));
  CHECK(r == doctest::Approx(5.0));
  CHECK(f.piece_left_of(0.0)(0.0) == 0.0);
  CHECK(f.piece_right_of(2.0)(2.0) == 5.0);
}

TEST_CASE("seeded property suite passes") {
  const auto ids = check::run_identity_checks();
  CHECK(ids.all_passed());
  const auto props = check::run_property_checks(200);
  CHECK(props.all_passed());
  for (const auto& c : props.checks) {
    CHECK(c.cases >= 200);
    CHECK(c.max_error < 1e-9);
  }
}

TEST_CASE("random family respects its bounds") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Distribution f = check::random_distribution(rng);
    CHECK(f.breakpoints().size() <= 3);
    for (const auto& d : f.deltas()) {
      CHECK(d.order <= 2);
    }
  }
}
