#include "distbeam/interface.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distbeam/errors.hpp"

namespace distbeam::interface {

namespace {

constexpr double kNonzero = 1e-12;

double grid_point(double lo, double hi, int points, int i) {
  if (points <= 1) {
    return lo;
  }
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

struct OdeCheck {
  double worst_ratio = 0.0;
  double worst_x = 0.0;
  double worst_residual = 0.0;
};

// Residual of sum_i C(2,i) a^{(i)} phi^{(4-i)} - w^2 b phi, relative to the
// largest individual term on the whole side (pointwise ratios blow up at nodes).
OdeCheck check_one_sided_ode(const SmoothExpr& phi, const SmoothExpr& a, const SmoothExpr& b,
                             double w, double lo, double hi, int points) {
  const SmoothExpr a1 = a.derivative();
  const SmoothExpr a2 = a1.derivative();
  const SmoothExpr p2 = phi.derivative(2);
  const SmoothExpr p3 = p2.derivative();
  const SmoothExpr p4 = p3.derivative();
  OdeCheck out;
  double mag = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = grid_point(lo, hi, points, i);
    const double t0 = a(x) * p4(x);
    const double t1 = 2.0 * a1(x) * p3(x);
    const double t2 = a2(x) * p2(x);
    const double t3 = w * w * b(x) * phi(x);
    const double r = t0 + t1 + t2 - t3;
    mag = std::max({mag, std::abs(t0), std::abs(t1), std::abs(t2), std::abs(t3)});
    if (std::abs(r) > std::abs(out.worst_residual) || i == 0) {
      out.worst_x = x;
      out.worst_residual = r;
    }
  }
  out.worst_ratio = (mag > 0.0) ? std::abs(out.worst_residual) / mag : 0.0;
  return out;
}

double max_abs_on(const SmoothExpr& f, double lo, double hi, int points) {
  double m = 0.0;
  for (int i = 0; i < points; ++i) {
    m = std::max(m, std::abs(f(grid_point(lo, hi, points, i))));
  }
  return m;
}

}  // namespace

DerivedCoeffs derived_coeffs(const CoeffSet& c) {
  return DerivedCoeffs{
      c.a_minus_0 + c.a_plus_1,  c.a_minus_0 + c.a_minus_1, c.a_plus_0 + c.a_plus_1,
      c.a_plus_0 - c.a_minus_0,  c.a_plus_1 - c.a_minus_1,  c.b_minus,
      c.b_plus,
  };
}

ProbeGrid default_probe_grid(const CoeffSet& c) { return ProbeGrid{c.xi0 - 1.0, c.xi0 + 1.0, 1001}; }

ConditionReport check_conditions(const CoeffSet& c, const ProbeGrid& grid) {
  const DerivedCoeffs d = derived_coeffs(c);
  ConditionReport r;
  r.c1_ok = std::abs(d.a(c.xi0)) > kNonzero;
  r.c2_ok = true;
  for (int i = 0; i < grid.points && r.c2_ok; ++i) {
    const double x = grid_point(grid.lo, grid.hi, grid.points, i);
    r.c2_ok = std::abs(d.a_minus(x)) > kNonzero && std::abs(d.a_plus(x)) > kNonzero;
  }
  return r;
}

InterfaceMatrices build_interface_matrices(const CoeffSet& c, const ProbeGrid& grid) {
  const ConditionReport cond = check_conditions(c, grid);
  if (!cond.c1_ok || !cond.c2_ok) {
    throw PreconditionError(!cond.c1_ok ? "a(xi0) vanishes: interface matrices undefined"
                                        : "a_- or a_+ vanishes on the probe grid");
  }
  const DerivedCoeffs d = derived_coeffs(c);
  const double x0 = c.xi0;
  const double w2 = c.w * c.w;
  const double a = d.a(x0);
  const double da = d.a.derivative_at(x0, 1);
  const double am = d.a_minus(x0);
  const double dam = d.a_minus.derivative_at(x0, 1);
  const double ap = d.a_plus(x0);
  const double dap = d.a_plus.derivative_at(x0, 1);
  const auto& A = c.A;
  const auto& B = c.B;

  InterfaceMatrices m;
  // clang-format off
  m.A << B(1,0)*w2,      -B(1,1)*w2,     dam + B(1,2)*w2,    am - B(1,3)*w2,
         B(1,1)*w2,      -2*B(1,2)*w2,   am + 3*B(1,3)*w2,   0.0,
         -da + B(1,2)*w2, a - 3*B(1,3)*w2, -A(1,0),          A(1,1),
         a + B(1,3)*w2,  0.0,            -A(1,1),            0.0;

  m.B << -B(0,0)*w2,     B(0,1)*w2,      dap - B(0,2)*w2,    ap + B(0,3)*w2,
         -B(0,1)*w2,     2*B(0,2)*w2,    ap - 3*B(0,3)*w2,   0.0,
         -da - B(0,2)*w2, a + 3*B(0,3)*w2, A(0,0),           -A(0,1),
         a - B(0,3)*w2,  0.0,            A(0,1),             0.0;
  // clang-format on
  return m;
}

InterfaceMatrices build_interface_matrices(const CoeffSet& c) {
  return build_interface_matrices(c, default_probe_grid(c));
}

Solvability solvability(const InterfaceMatrices& m) {
  Solvability s;
  s.det_A = det4(m.A);
  s.det_B = det4(m.B);
  const double scale_a = std::max(1.0, std::pow(m.A.cwiseAbs().maxCoeff(), 4));
  const double scale_b = std::max(1.0, std::pow(m.B.cwiseAbs().maxCoeff(), 4));
  s.unique_from_left = std::abs(s.det_B) > kNonzero * scale_b;
  s.unique_from_right = std::abs(s.det_A) > kNonzero * scale_a;
  return s;
}

Regularity classify_regularity(int M) {
  if (M <= 4) {
    return Regularity{true, 0};
  }
  return Regularity{false, M - 4};
}

ContinuityClass continuity_class(const CoeffSet& c) {
  ContinuityClass out;
  out.c0_guaranteed = true;
  out.c1_guaranteed = true;
  for (int i = 0; i < 2; ++i) {
    if (c.A(i, 1) != 0.0 || c.B(i, 3) != 0.0) {
      out.c0_guaranteed = false;
    }
    if (c.A(i, 0) != 0.0 || c.B(i, 2) != 0.0) {
      out.c1_guaranteed = false;
    }
  }
  out.c1_guaranteed = out.c1_guaranteed && out.c0_guaranteed;
  return out;
}

Distribution stiffness_coefficient(const CoeffSet& c, int i) {
  const SmoothExpr& left = (i == 0) ? c.a_minus_0 : c.a_minus_1;
  const SmoothExpr& right = (i == 0) ? c.a_plus_0 : c.a_plus_1;
  RawDistribution raw{{c.xi0}, {left, right}, {}};
  for (int j = 0; j < 2; ++j) {
    raw.deltas.push_back(DeltaTerm{c.xi0, j, c.A(i, j)});
  }
  return normalize(std::move(raw));
}

Distribution mass_coefficient(const CoeffSet& c, int i) {
  RawDistribution raw{{c.xi0}, {}, {}};
  if (i == 0) {
    raw.pieces = {c.b_minus, c.b_plus};
  } else {
    raw.pieces = {SmoothExpr{}, SmoothExpr{}};
  }
  for (int j = 0; j < 4; ++j) {
    raw.deltas.push_back(DeltaTerm{c.xi0, j, c.B(i, j)});
  }
  return normalize(std::move(raw));
}

double ResidualReport::max_delta() const {
  double m = 0.0;
  for (const auto& [order, coeff] : delta_coeffs) {
    m = std::max(m, std::abs(coeff));
  }
  return m;
}

bool ResidualReport::passed(double rel_tol) const {
  return max_delta() <= rel_tol * scale && smooth_residual_max <= rel_tol * scale;
}

ResidualReport residual_check(const SmoothExpr& phi1, const SmoothExpr& phi2, const CoeffSet& c,
                              const ResidualOptions& opts) {
  if (!(opts.lo < c.xi0 && c.xi0 < opts.hi)) {
    throw InvalidInput("singular point must lie inside the working interval");
  }
  const DerivedCoeffs d = derived_coeffs(c);
  const OdeCheck left =
      check_one_sided_ode(phi1, d.a_minus, d.b_minus, c.w, opts.lo, c.xi0, opts.points_per_side);
  const OdeCheck right =
      check_one_sided_ode(phi2, d.a_plus, d.b_plus, c.w, c.xi0, opts.hi, opts.points_per_side);
  for (const auto& [side, chk] : {std::pair{"left", left}, std::pair{"right", right}}) {
    if (chk.worst_ratio > opts.ode_rel_tol) {
      std::ostringstream os;
      os.precision(10);
      os << side << " piece does not solve its regular ODE: worst probe x=" << chk.worst_x
         << " residual=" << chk.worst_residual << " relative=" << chk.worst_ratio;
      throw PreconditionError(os.str());
    }
  }

  const Distribution phi = Distribution::piecewise(c.xi0, phi1, phi2);
  const Distribution a0 = stiffness_coefficient(c, 0);
  const Distribution a1 = stiffness_coefficient(c, 1);
  const Distribution b0 = mass_coefficient(c, 0);
  const Distribution b1 = mass_coefficient(c, 1);

  std::vector<Distribution> terms;
  constexpr double kBinom2[3] = {1.0, 2.0, 1.0};
  for (int i = 0; i <= 2; ++i) {
    const Distribution phi_d = derivative(phi, 4 - i);
    terms.push_back(scale(star(derivative(a0, i), phi_d), kBinom2[i]));
    terms.push_back(scale(star(phi_d, derivative(a1, i)), kBinom2[i]));
  }
  const double w2 = c.w * c.w;
  terms.push_back(scale(star(b0, phi), -w2));
  terms.push_back(scale(star(phi, b1), -w2));

  ResidualReport report;
  double largest = 1.0;
  Distribution total;
  for (const Distribution& t : terms) {
    for (const DeltaTerm& dt : t.deltas()) {
      largest = std::max(largest, std::abs(dt.coeff));
    }
    largest = std::max(largest, max_abs_on(t.piece_left_of(c.xi0), opts.lo, c.xi0, opts.points_per_side));
    largest = std::max(largest, max_abs_on(t.piece_right_of(c.xi0), c.xi0, opts.hi, opts.points_per_side));
    total = total + t;
  }
  report.scale = largest;

  for (int j = 0; j < 4; ++j) {
    report.delta_coeffs[j] = 0.0;
  }
  for (const DeltaTerm& dt : total.deltas()) {
    report.delta_coeffs[dt.order] += dt.coeff;
  }
  report.smooth_residual_max =
      std::max(max_abs_on(total.piece_left_of(c.xi0), opts.lo, c.xi0, opts.points_per_side),
               max_abs_on(total.piece_right_of(c.xi0), c.xi0, opts.hi, opts.points_per_side));
  return report;
}

}  // namespace distbeam::interface
