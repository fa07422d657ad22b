#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "distbeam/beam.hpp"
#include "distbeam/errors.hpp"

using namespace distbeam;
using namespace distbeam::beam;

namespace {

constexpr double kPi = std::numbers::pi;

// First root of cos(a) cosh(a) = 1 above 3, by plain bisection.
double clamped_root() {
  auto f = [](double a) { return std::cos(a) * std::cosh(a) - 1.0; };
  double lo = 4.0, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo) < 0) == (f(mid) < 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BeamModel cracked(BoundaryKind bc) {
  BeamModel bm;
  bm.bc = bc;
  bm.ratio = 1.5;
  bm.lambda0 = 2.0;
  bm.lambda1 = 2.0;
  bm.xi0 = 0.4;
  return bm;
}

}  // namespace

TEST_CASE("model validation") {
  BeamModel bm;
  CHECK_NOTHROW(validate(bm));
  for (auto mutate : std::initializer_list<void (*)(BeamModel&)>{
           [](BeamModel& b) { b.xi0 = 0.0; }, [](BeamModel& b) { b.xi0 = 1.5; },
           [](BeamModel& b) { b.ratio = 0.0; }, [](BeamModel& b) { b.mass = -1.0; },
           [](BeamModel& b) { b.stiffness = 0.0; }, [](BeamModel& b) { b.lambda1 = -0.1; }}) {
    BeamModel b = bm;
    mutate(b);
    CHECK_THROWS_AS(validate(b), InvalidInput);
  }
}

TEST_CASE("scalar helpers") {
  BeamModel bm;
  bm.lambda0 = bm.lambda1 = 1.0;
  CHECK(s_param(bm) == 1.0);
  bm.lambda0 = 2.0;
  bm.lambda1 = 0.0;
  bm.ratio = 3.0;
  CHECK(s_param(bm) == 0.5);
  CHECK(s_param(BeamModel{}) == 0.0);
  CHECK(beta(bm) == doctest::Approx(std::pow(3.0, -0.25)));
  CHECK(alpha_to_omega(BeamModel{}, 2.0) == 4.0);
  CHECK(time_factor(3.0, 1.0, 0.0, 0.0) == 1.0);
  CHECK(time_factor(1.0, 0.0, 2.0, kPi / 2) == doctest::Approx(2.0));
}

TEST_CASE("coefficient sets") {
  BeamModel bm;
  const auto c = to_coeffset(bm, 1.0);
  const auto d = interface::derived_coeffs(c);
  CHECK(c.A.isZero());
  CHECK(c.B.isZero());
  CHECK(d.a_minus(0.2) == 1.0);
  CHECK(d.a_plus(0.7) == 1.0);

  bm.ratio = 2.0;
  bm.lambda0 = 2.0;
  bm.lambda1 = 1.0;
  bm.stiffness = 4.0;
  bm.mass = 8.0;
  const auto g = to_coeffset(bm, 1.0);
  CHECK(g.A(1, 0) == -2.0);
  CHECK(g.A(0, 0) == -2.0);
  CHECK(g.b_minus(0.1) == 2.0);

  Eigen::Matrix2d split;
  split << 1.0, 0.5, 1.0, 0.5;
  const auto s = to_coeffset_general(bm, split, 1.0);
  CHECK(s.A(0, 0) == doctest::Approx(-(1.0 + 2.0 * 0.5)));
  CHECK(s.A(1, 0) == s.A(0, 0));
  const auto sd = interface::derived_coeffs(s);
  CHECK(sd.a_minus(0.0) == doctest::Approx(1.0));
  CHECK(sd.a_plus(0.0) == doctest::Approx(2.0));
  split(0, 0) = 3.0;
  CHECK_THROWS_AS(to_coeffset_general(bm, split, 1.0), InvalidInput);
}

TEST_CASE("characteristic matrix and determinant") {
  BeamModel bm;
  const auto M = build_M<double>(bm, 2.0);
  CHECK(M(0, 0) == 0.0);
  CHECK(M(0, 2) == doctest::Approx(std::sin(2.0)));
  CHECK(M(0, 5) == doctest::Approx(std::cosh(2.0)));

  CHECK(std::abs(char_det(bm, kPi)) < 1e-9);
  CHECK(std::abs(char_det(bm, 2 * kPi)) < 1e-9);
  CHECK(std::abs(char_det(bm, kPi / 2)) > 1e-3);
  CHECK_THROWS_AS(char_det(bm, 0.0), InvalidInput);

  bm.bc = BoundaryKind::ClampedClamped;
  CHECK(std::abs(char_det(bm, 4.730041)) < 1e-6);

  // Row normalization keeps the determinant finite far out.
  bm.lambda0 = 3.0;
  for (double a = 0.5; a <= 30.0; a += 0.5) {
    CHECK(std::isfinite(char_det(bm, a)));
  }
}

TEST_CASE("uniform beam spectra") {
  BeamModel bm;
  SearchOptions opts;
  opts.n_modes = 5;
  for (double xi0 : {0.3, 0.5, 0.77}) {
    bm.xi0 = xi0;
    bm.bc = BoundaryKind::PinnedPinned;
    const auto pp = find_frequencies(bm, opts);
    for (int n = 0; n < 5; ++n) {
      CHECK(pp[static_cast<std::size_t>(n)] == doctest::Approx((n + 1) * kPi).epsilon(1e-10));
    }
    bm.bc = BoundaryKind::ClampedClamped;
    CHECK(find_frequencies(bm, opts)[0] == doctest::Approx(clamped_root()).epsilon(1e-10));
  }
}

TEST_CASE("shortfall reports what was found") {
  BeamModel bm;
  SearchOptions opts;
  opts.n_modes = 4;
  opts.alpha_max = 10.0;
  try {
    find_frequencies(bm, opts);
    FAIL("expected a shortfall");
  } catch (const FrequencyShortfall& e) {
    CHECK(e.found().size() == 3);
  }
  opts.n_modes = 0;
  CHECK_THROWS_AS(find_frequencies(bm, opts), InvalidInput);
}

TEST_CASE("root scan refines double roots without sign change") {
  // (a - 2.003)^2 (a - 5): touches zero between grid points, crosses at 5.
  auto f = [](double a) { return (a - 2.003) * (a - 2.003) * (a - 5.0) * 1e-9; };
  SearchOptions opts;
  opts.alpha_max = 6.0;
  const auto roots = scan_roots(f, opts);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].alpha == doctest::Approx(2.003).epsilon(1e-6));
  CHECK(roots[0].near_double);
  CHECK(roots[1].alpha == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_FALSE(roots[1].near_double);
}

TEST_CASE("oracle agrees with the characteristic determinant") {
  for (auto bc : {BoundaryKind::PinnedPinned, BoundaryKind::ClampedClamped}) {
    for (double k : {0.5, 1.0, 2.0}) {
      BeamModel bm;
      bm.bc = bc;
      bm.ratio = k;
      bm.xi0 = 0.35;
      const auto a = find_frequencies(bm);
      const auto o = oracle_stepped_beam(bm, 3);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a[i] == doctest::Approx(o[i]).epsilon(1e-9));
      }
    }
  }
  BeamModel bm;
  bm.lambda0 = 1.0;
  CHECK_THROWS_AS(oracle_stepped_beam(bm, 3), InvalidInput);
}

TEST_CASE("uniform modes are sines") {
  BeamModel bm;
  for (int n : {1, 2}) {
    const Mode m = mode_shape(bm, n * kPi);
    CHECK(m.consts(1) == 0.0);
    CHECK(m.consts(3) == 0.0);
    for (double x : {0.1, 0.3, 0.5, 0.9}) {
      CHECK(eval_mode(m, bm, x) == doctest::Approx(std::sin(n * kPi * x)).epsilon(1e-9));
    }
    CHECK(interface_residual(m, bm).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(mode_shape(bm, 2.0), NotAFrequency);
  CHECK_THROWS_AS(eval_mode(mode_shape(bm, kPi), bm, 1.5), InvalidInput);
}

TEST_CASE("cracked modes satisfy boundary and interface conditions") {
  for (auto bc : {BoundaryKind::PinnedPinned, BoundaryKind::ClampedClamped}) {
    const BeamModel bm = cracked(bc);
    for (double alpha : find_frequencies(bm)) {
      const Mode m = mode_shape(bm, alpha);
      CHECK(interface_residual(m, bm).cwiseAbs().maxCoeff() < 1e-7);
      const int second = (bc == BoundaryKind::PinnedPinned) ? 2 : 1;
      for (double x : {0.0, 1.0}) {
        CHECK(std::abs(eval_mode(m, bm, x)) < 1e-9);
        CHECK(std::abs(eval_mode(m, bm, x, second)) < 1e-9 * std::pow(alpha, second));
      }
      if (bc == BoundaryKind::PinnedPinned) {
        CHECK(m.consts(1) == 0.0);
        CHECK(m.consts(3) == 0.0);
      } else {
        CHECK(m.consts(0) == -m.consts(2));
        CHECK(m.consts(1) == -m.consts(3));
      }
      // Sup norm 1 on the sample grid, values continuous across the crack.
      double sup = 0.0;
      for (int i = 0; i <= 1000; ++i) sup = std::max(sup, std::abs(eval_mode(m, bm, i / 1000.0)));
      CHECK(sup == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(piece_state(m, 0, bm.xi0)(0) - piece_state(m, 1, bm.xi0)(0)) < 1e-9);
      // The crack shows up as a slope jump S phi''.
      const double jump = piece_state(m, 1, bm.xi0)(1) - piece_state(m, 0, bm.xi0)(1);
      CHECK(jump == doctest::Approx(s_param(bm) * piece_state(m, 0, bm.xi0)(2)).epsilon(1e-7));
      // Sign convention: largest constant positive.
      Eigen::Index lead = 0;
      m.consts.cwiseAbs().maxCoeff(&lead);
      CHECK(m.consts(lead) > 0.0);

      const auto [left, right] = mode_pieces(m);
      CHECK(left(0.2) == doctest::Approx(eval_mode(m, bm, 0.2)));
      CHECK(right(0.8) == doctest::Approx(eval_mode(m, bm, 0.8)));
    }
  }
}

TEST_CASE("relaxed mode leaves only the shear balance open") {
  const BeamModel bm = cracked(BoundaryKind::PinnedPinned);
  const double alpha = find_frequencies(bm)[0] + 1e-3;
  const Mode m = relaxed_mode(bm, alpha);
  const Eigen::Vector4d r = interface_residual(m, bm);
  CHECK(std::abs(r(0)) > 1e-4);
  CHECK(r.tail<3>().cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("frequencies depend on the crack only through S") {
  for (auto bc : {BoundaryKind::PinnedPinned, BoundaryKind::ClampedClamped}) {
    BeamModel bm;
    bm.bc = bc;
    bm.ratio = 0.7;
    bm.xi0 = 0.6;
    bm.lambda0 = 3.0;
    const auto a = find_frequencies(bm);
    bm.lambda0 = 0.5;
    bm.lambda1 = 2.5;
    const auto b = find_frequencies(bm);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("the 8x8 interface system reproduces the 6x6 frequencies") {
  for (auto bc : {BoundaryKind::PinnedPinned, BoundaryKind::ClampedClamped}) {
    const BeamModel bm = cracked(bc);
    // A split crack is a different coefficient set; its spectrum only has to
    // be well defined.
    Eigen::Matrix2d symmetric;
    symmetric << bm.lambda0 / 2, bm.lambda1 / 2, bm.lambda0 / 2, bm.lambda1 / 2;
    const auto six = find_frequencies(bm);
    const auto eight = find_frequencies_split(bm, symmetric);
    REQUIRE(eight.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::isfinite(eight[i]));
      CHECK(eight[i] > 0.0);
    }

    // With the default coefficient set plugged into the 8x8 system, the
    // roots are exactly those of the 6x6 system.
    auto det8 = [&](double alpha) {
      const auto c = to_coeffset(bm, alpha_to_omega(bm, alpha));
      return row_normalized(interface_system(bm, interface::build_interface_matrices(c), alpha))
          .partialPivLu()
          .determinant();
    };
    const auto roots = scan_roots(det8, SearchOptions{}, 3);
    REQUIRE(roots.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(roots[i].alpha == doctest::Approx(six[i]).epsilon(1e-10));
  }
}

TEST_CASE("sweeps are ordered and independent of thread count") {
  SweepSpec spec;
  spec.varying = SweepParam::Xi0;
  spec.grid = {0.7, 0.2, 0.5, 0.35};
  spec.base.lambda0 = spec.base.lambda1 = 2.0;
  const auto one = sweep(spec, 1);
  const auto four = sweep(spec, 4);
  REQUIRE(one.size() == 4);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].value == four[i].value);
    CHECK(one[i].alphas == four[i].alphas);
    if (i > 0) CHECK(one[i - 1].value < one[i].value);
  }

  spec.varying = SweepParam::Lambda;
  spec.grid = {0.0};
  CHECK(sweep(spec).size() == 1);

  spec.grid = {1.0};
  spec.search.alpha_max = 5.0;
  const auto gap = sweep(spec);
  CHECK(gap[0].flagged);
  CHECK(gap[0].alphas[0].has_value());
  CHECK_FALSE(gap[0].alphas[2].has_value());

  spec.varying = SweepParam::Xi0;
  spec.grid = {1.2};
  CHECK_THROWS_AS(sweep(spec), InvalidInput);
  CHECK(parse_sweep_param("k") == SweepParam::Ratio);
  CHECK_FALSE(parse_sweep_param("mass").has_value());
  CHECK(apply_sweep_value(BeamModel{}, SweepParam::Lambda, 3.0).lambda1 == 3.0);
}

TEST_CASE("softening: the first frequency does not increase with the crack") {
  BeamModel bm;
  double prev = 1e9;
  for (double l = 0.0; l <= 10.0; l += 0.5) {
    bm.lambda0 = bm.lambda1 = l;
    const double a1 = find_frequencies(bm)[0];
    CHECK(a1 <= prev + 1e-12);
    prev = a1;
  }
}
