#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "distbeam/interface.hpp"
#include "distbeam/smooth_expr.hpp"

namespace distbeam::beam {

enum class BoundaryKind { PinnedPinned, ClampedClamped };

/// Beam on [0, 1] with stiffness A to the left of xi0, k*A to the right, and
/// a crack at xi0 carried by deltas of intensity lambda0 (left) and lambda1
/// (right) in the stiffness.
struct BeamModel {
  double stiffness = 1.0;  // A, N m^2
  double ratio = 1.0;      // k
  double mass = 1.0;       // m, kg/m
  double xi0 = 0.5;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  BoundaryKind bc = BoundaryKind::PinnedPinned;
};

/// Throws InvalidInput unless A, k, m > 0, 0 < xi0 < 1 and lambda0, lambda1 >= 0.
void validate(const BeamModel& bm);

const char* to_string(BoundaryKind bc);

/// beta = k^{-1/4}
inline double beta(const BeamModel& bm) { return std::pow(bm.ratio, -0.25); }

/// S = (lambda0 + lambda1) / (k + 1)
double s_param(const BeamModel& bm);

/// w = alpha^2 sqrt(A / m)
double alpha_to_omega(const BeamModel& bm, double alpha);

/// T(t) = P cos(w t) + Q sin(w t)
double time_factor(double w, double P, double Q, double t);

/// Interface coefficients of the beam, normalized by A:
///   a_0 = H(xi0 - x) - k lambda1 delta,  a_1 = k H(x - xi0) - lambda0 delta,
///   b_0 = m / A,  b_1 = 0.
interface::CoeffSet to_coeffset(const BeamModel& bm, double w);

/// Alternative split of the crack between the two stiffness coefficients:
///   a_i = (H(xi0 - x) + k H(x - xi0)) / 2 - (lambda_i0 + k lambda_i1) delta
/// with lambda_00 + lambda_10 = lambda0 and lambda_01 + lambda_11 = lambda1.
interface::CoeffSet to_coeffset_general(const BeamModel& bm, const Eigen::Matrix2d& split, double w);

/// Left-minus-right values of the four interface equations at xi0 for the
/// state vectors (phi, phi', phi'', phi''') of the left and right pieces.
Eigen::Vector4d interface_residual(const BeamModel& bm, const Eigen::Vector4d& left,
                                   const Eigen::Vector4d& right);

/// (sin, cos, sinh, cosh)^{(n)}(rate * x), chain-rule factor included.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> basis_derivative(Scalar rate, Scalar x, int n) {
  using std::cos;
  using std::cosh;
  using std::pow;
  using std::sin;
  using std::sinh;
  const Scalar z = rate * x;
  const Scalar s = sin(z), c = cos(z), sh = sinh(z), ch = cosh(z);
  Eigen::Matrix<Scalar, 4, 1> v;
  switch (((n % 4) + 4) % 4) {
    case 0: v << s, c, sh, ch; break;
    case 1: v << c, -s, ch, sh; break;
    case 2: v << -s, -c, sh, ch; break;
    default: v << -c, s, ch, sh; break;
  }
  return v * Scalar(pow(rate, n));
}

/// The 6x6 characteristic matrix. Unknowns (A1, C1, A2, B2, C2, D2) for PP
/// and (C1, D1, A2, B2, C2, D2) for CC. Rows: two right-end boundary
/// conditions, continuity, slope jump, moment and shear balance at xi0.
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 6> build_M(const BeamModel& bm, Scalar alpha) {
  using std::cos;
  using std::cosh;
  using std::pow;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  const Scalar k = Scalar(bm.ratio);
  const Scalar b = pow(k, Scalar(-0.25));
  const Scalar xi = Scalar(bm.xi0);
  const Scalar S = (Scalar(bm.lambda0) + Scalar(bm.lambda1)) / (k + Scalar(1));
  const Scalar sk = sqrt(k);
  const Scalar qk = pow(k, Scalar(0.25));

  const Scalar s1 = sin(alpha * b), c1 = cos(alpha * b), sh1 = sinh(alpha * b), ch1 = cosh(alpha * b);
  const Scalar s2 = sin(xi * alpha * b), c2 = cos(xi * alpha * b);
  const Scalar sh2 = sinh(xi * alpha * b), ch2 = cosh(xi * alpha * b);
  const Scalar s3 = sin(xi * alpha), c3 = cos(xi * alpha), sh3 = sinh(xi * alpha), ch3 = cosh(xi * alpha);

  Eigen::Matrix<Scalar, 6, 6> M;
  if (bm.bc == BoundaryKind::PinnedPinned) {
    const Scalar f1 = -c3 + alpha * S * s3;
    const Scalar f2 = -ch3 - alpha * S * sh3;
    // clang-format off
    M << Scalar(0), Scalar(0), s1,      c1,       sh1,       ch1,
         Scalar(0), Scalar(0), -s1,     -c1,      sh1,       ch1,
         s3,        sh3,       -s2,     -c2,      -sh2,      -ch2,
         f1,        f2,        b * c2,  -b * s2,  b * ch2,   b * sh2,
         -s3,       sh3,       sk * s2, sk * c2,  -sk * sh2, -sk * ch2,
         -c3,       ch3,       qk * c2, -qk * s2, -qk * ch2, -qk * sh2;
    // clang-format on
  } else {
    const Scalar g1 = -c3 + ch3 + S * alpha * (s3 + sh3);
    const Scalar g2 = s3 + sh3 + S * alpha * (c3 + ch3);
    // clang-format off
    M << Scalar(0), Scalar(0), c1,       -s1,      ch1,       sh1,
         Scalar(0), Scalar(0), s1,       c1,       sh1,       ch1,
         -s3 + sh3, -c3 + ch3, -s2,      -c2,      -sh2,      -ch2,
         g1,        g2,        -b * c2,  b * s2,   -b * ch2,  -b * sh2,
         s3 + sh3,  c3 + ch3,  sk * s2,  sk * c2,  -sk * sh2, -sk * ch2,
         c3 + ch3,  -s3 + sh3, qk * c2,  -qk * s2, -qk * ch2, -qk * sh2;
    // clang-format on
  }
  return M;
}

/// Divides every row by its Euclidean norm.
template <typename Derived>
auto row_normalized(const Eigen::MatrixBase<Derived>& m) {
  typename Derived::PlainObject out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const auto n = out.row(r).norm();
    if (n > 0) {
      out.row(r) /= n;
    }
  }
  return out;
}

/// det of the row-normalized characteristic matrix; same zeros and signs as
/// det build_M, but bounded for large alpha.
double char_det(const BeamModel& bm, double alpha);

struct SearchOptions {
  int n_modes = 3;
  double alpha_max = 25.0;
  double grid_step = 0.01;
  double tol = 1e-12;
};

struct Root {
  double alpha = 0.0;
  bool near_double = false;  // found by |det| minimization, not a sign change
};

/// Grid scan over (grid_step, alpha_max] with bisection on sign changes and
/// |f| minimization at small grid-local minima. Stops once `max_roots` are
/// confirmed (0 = scan the whole range).
std::vector<Root> scan_roots(const std::function<double(double)>& f, const SearchOptions& opts,
                             int max_roots = 0);

/// First n_modes roots of char_det, ascending. Throws FrequencyShortfall.
std::vector<double> find_frequencies(const BeamModel& bm, const SearchOptions& opts = {});

struct Mode {
  double alpha = 0.0;
  double beta = 1.0;
  /// (A1, B1, C1, D1, A2, B2, C2, D2)
  Eigen::Matrix<double, 8, 1> consts = Eigen::Matrix<double, 8, 1>::Zero();
  BoundaryKind bc = BoundaryKind::PinnedPinned;
  /// sigma_min / sigma_max of the scaled characteristic matrix at alpha.
  double residual = 0.0;
};

/// Null vector of the characteristic matrix at alpha, expanded to all eight
/// constants and normalized to sup-norm 1. Throws NotAFrequency when the
/// relative smallest singular value exceeds `threshold`.
Mode mode_shape(const BeamModel& bm, double alpha, double threshold = 1e-8);

/// Same construction without the singularity check; used to probe
/// non-eigenvalues.
Mode least_singular_mode(const BeamModel& bm, double alpha);

/// Exact null vector of the characteristic system with the shear equation
/// removed: boundary conditions, continuity, slope jump and moment balance
/// hold at any alpha, so off a frequency the whole defect sits in the shear
/// balance at xi0. Used to demonstrate failing verifications.
Mode relaxed_mode(const BeamModel& bm, double alpha);

/// n-th derivative of the mode at x in [0, 1]; x == xi0 uses the left piece.
double eval_mode(const Mode& mode, const BeamModel& bm, double x, int derivative = 0);

/// (phi, phi', phi'', phi''') of the left (side 0) or right (side 1) piece at x.
Eigen::Vector4d piece_state(const Mode& mode, int side, double x);

/// Left and right pieces as closed-form expressions.
std::pair<SmoothExpr, SmoothExpr> mode_pieces(const Mode& mode);

Eigen::Vector4d interface_residual(const Mode& mode, const BeamModel& bm);

/// 8x8 system built directly from interface matrices: two boundary rows at
/// each end plus A * state_left(xi0) - B * state_right(xi0). Unknowns are
/// all eight constants. Used for crack splits without a dedicated 6x6 form.
Eigen::Matrix<double, 8, 8> interface_system(const BeamModel& bm,
                                              const interface::InterfaceMatrices& m, double alpha);

/// Row-normalized determinant of interface_system for a given crack split.
double split_char_det(const BeamModel& bm, const Eigen::Matrix2d& split, double alpha);
std::vector<double> find_frequencies_split(const BeamModel& bm, const Eigen::Matrix2d& split,
                                           const SearchOptions& opts = {});

enum class SweepParam { Lambda, Ratio, Xi0 };

const char* to_string(SweepParam p);
std::optional<SweepParam> parse_sweep_param(const std::string& name);

struct SweepSpec {
  SweepParam varying = SweepParam::Lambda;
  std::vector<double> grid;
  BeamModel base;
  SearchOptions search;
};

struct SweepRow {
  double value = 0.0;
  std::vector<std::optional<double>> alphas;  // empty optional = not found
  bool flagged = false;
  std::string note;
};

/// Applies the swept value to a copy of `base` (lambda sets lambda0 = lambda1).
BeamModel apply_sweep_value(const BeamModel& base, SweepParam p, double value);

/// One row per grid value, ordered by value. Rows are evaluated concurrently
/// when `threads` > 1. Shortfalls and root-tracking jumps are flagged, not thrown.
std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads = 1);

/// Crack-free stepped beam (lambda0 = lambda1 = 0) solved by propagating
/// (phi, phi', a phi'', (a phi'')') across the junction with a transfer
/// matrix and imposing the boundary conditions on a 2x2 determinant.
std::vector<double> oracle_stepped_beam(const BeamModel& bm, int n_modes, double alpha_max = 25.0,
                                        double grid_step = 0.01);

}  // namespace distbeam::beam
