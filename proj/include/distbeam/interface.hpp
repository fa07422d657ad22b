#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "distbeam/distribution.hpp"
#include "distbeam/smooth_expr.hpp"

namespace distbeam::interface {

/// Coefficients of the fourth-order separable equation with a single
/// singular point xi0:
///   a_i = a_{i-} H(xi0 - x) + a_{i+} H(x - xi0) + sum_j A(i,j) delta^{(j)}
///   b_0 = b_- H(xi0 - x) + b_+ H(x - xi0) + sum_j B(0,j) delta^{(j)}
///   b_1 =                                    sum_j B(1,j) delta^{(j)}
/// The smooth part of b is carried entirely by b_0; for piecewise-smooth
/// solutions only the sums b_- and b_+ enter the equation.
struct CoeffSet {
  double xi0 = 0.0;
  double w = 0.0;
  SmoothExpr a_minus_0;
  SmoothExpr a_plus_0;
  SmoothExpr a_minus_1;
  SmoothExpr a_plus_1;
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Matrix<double, 2, 4> B = Eigen::Matrix<double, 2, 4>::Zero();
  SmoothExpr b_minus;
  SmoothExpr b_plus;
};

struct DerivedCoeffs {
  SmoothExpr a;        // a_{0-} + a_{1+}
  SmoothExpr a_minus;  // a_{0-} + a_{1-}
  SmoothExpr a_plus;   // a_{0+} + a_{1+}
  SmoothExpr v0;       // a_{0+} - a_{0-}
  SmoothExpr v1;       // a_{1+} - a_{1-}
  SmoothExpr b_minus;
  SmoothExpr b_plus;
};

DerivedCoeffs derived_coeffs(const CoeffSet& c);

/// Uniform sample of [lo, hi].
struct ProbeGrid {
  double lo = -1.0;
  double hi = 1.0;
  int points = 1001;
};

/// Default grid for a coefficient set: [xi0 - 1, xi0 + 1], 1001 points.
ProbeGrid default_probe_grid(const CoeffSet& c);

struct ConditionReport {
  bool c1_ok = false;  // a(xi0) != 0
  bool c2_ok = false;  // a_- and a_+ nonvanishing on the probe grid
};

ConditionReport check_conditions(const CoeffSet& c, const ProbeGrid& grid);

/// A and B with A * (phi1, phi1', phi1'', phi1''')(xi0) = B * (phi2, ...)(xi0).
struct InterfaceMatrices {
  Eigen::Matrix4d A;
  Eigen::Matrix4d B;
};

/// Throws PreconditionError when check_conditions fails on `grid`.
InterfaceMatrices build_interface_matrices(const CoeffSet& c, const ProbeGrid& grid);
InterfaceMatrices build_interface_matrices(const CoeffSet& c);

/// Laplace expansion of a 4x4 determinant.
template <typename Derived>
typename Derived::Scalar det4(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  auto minor3 = [&](int skip_col) {
    int cols[3];
    for (int c = 0, n = 0; c < 4; ++c) {
      if (c != skip_col) {
        cols[n++] = c;
      }
    }
    auto e = [&](int r, int c) { return m(r, cols[c]); };
    return e(1, 0) * (e(2, 1) * e(3, 2) - e(2, 2) * e(3, 1)) -
           e(1, 1) * (e(2, 0) * e(3, 2) - e(2, 2) * e(3, 0)) +
           e(1, 2) * (e(2, 0) * e(3, 1) - e(2, 1) * e(3, 0));
  };
  Scalar det = Scalar(0);
  for (int c = 0; c < 4; ++c) {
    const Scalar sign = (c % 2 == 0) ? Scalar(1) : Scalar(-1);
    det += sign * m(0, c) * minor3(c);
  }
  return det;
}

struct Solvability {
  double det_A = 0.0;
  double det_B = 0.0;
  bool unique_from_left = false;   // data given at x0 < xi0: needs det B != 0
  bool unique_from_right = false;  // data given at x0 > xi0: needs det A != 0
};

Solvability solvability(const InterfaceMatrices& m);

struct Regularity {
  bool delta_free = true;
  int max_order_bound = 0;
};

/// M = max{ord a_i'', ord b_i}. M <= 4 gives piecewise-smooth solutions,
/// otherwise the singular part has order at most M - 4.
Regularity classify_regularity(int M);

/// Sufficient (not necessary) conditions for continuous / C^1 solutions.
struct ContinuityClass {
  bool c0_guaranteed = false;
  bool c1_guaranteed = false;
};

ContinuityClass continuity_class(const CoeffSet& c);

struct ResidualOptions {
  double lo = 0.0;  // working interval; xi0 must lie strictly inside
  double hi = 1.0;
  int points_per_side = 101;
  double ode_rel_tol = 1e-8;
  double rel_tol = 1e-6;
};

struct ResidualReport {
  std::map<int, double> delta_coeffs;  // order -> coefficient of delta^{(order)}_{xi0}
  double smooth_residual_max = 0.0;
  double scale = 1.0;  // max(1, largest intermediate coefficient)

  double max_delta() const;
  bool passed(double rel_tol = 1e-6) const;
};

/// Assembles phi = H(xi0 - x) phi1 + H(x - xi0) phi2 and evaluates the
/// full distributional left-hand side
///   sum_i C(2,i) [a_0^{(i)} * phi^{(4-i)} + phi^{(4-i)} * a_1^{(i)}]
///     - w^2 (b_0 * phi + phi * b_1)
/// with the algebra's product and derivative. Delta coefficients vanish iff
/// the interface condition holds. Throws PreconditionError (naming the worst
/// probe point) when phi1/phi2 do not solve their one-sided ODEs.
ResidualReport residual_check(const SmoothExpr& phi1, const SmoothExpr& phi2, const CoeffSet& c,
                              const ResidualOptions& opts = {});

/// a_0 and a_1 (and b_0, b_1) as distributions.
Distribution stiffness_coefficient(const CoeffSet& c, int i);
Distribution mass_coefficient(const CoeffSet& c, int i);

}  // namespace distbeam::interface
