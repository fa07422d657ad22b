#include <cmath>
#include <sstream>

#include "distbeam/beam.hpp"
#include "distbeam/errors.hpp"

namespace distbeam::beam {

namespace {

using Real = long double;
using Mat4 = Eigen::Matrix<Real, 4, 4>;

// Transfer matrix of (phi, phi', a phi'', (a phi'')') over a uniform segment
// of stiffness a and length len, built from the Krylov functions.
Mat4 segment_transfer(Real alpha, Real a, Real len) {
  const Real s = alpha * std::pow(a, Real(-0.25L));
  const Real z = s * len;
  const Real ch = std::cosh(z), c = std::cos(z), sh = std::sinh(z), sn = std::sin(z);
  const Real K1 = (ch + c) / 2, K2 = (sh + sn) / 2, K3 = (ch - c) / 2, K4 = (sh - sn) / 2;
  Mat4 U;
  // clang-format off
  U << K1,             K2 / s,        K3 / (s * s), K4 / (s * s * s),
       s * K4,         K1,            K2 / s,       K3 / (s * s),
       s * s * K3,     s * K4,        K1,           K2 / s,
       s * s * s * K2, s * s * K3,    s * K4,       K1;
  // clang-format on
  const Eigen::Matrix<Real, 4, 1> d{1, 1, a, a};
  return d.asDiagonal() * U * d.cwiseInverse().asDiagonal();
}

Real oracle_det(const BeamModel& bm, Real alpha) {
  const Real xi = bm.xi0;
  const Mat4 T = segment_transfer(alpha, Real(bm.ratio), 1 - xi) * segment_transfer(alpha, Real(1), xi);
  // Free state components at x = 0 and the components forced to zero at x = 1.
  int c0 = 1, c1 = 3, r0 = 0, r1 = 2;
  if (bm.bc == BoundaryKind::ClampedClamped) {
    c0 = 2;
    c1 = 3;
    r0 = 0;
    r1 = 1;
  }
  Eigen::Matrix<Real, 2, 2> m;
  m << T(r0, c0), T(r0, c1), T(r1, c0), T(r1, c1);
  const Real n0 = m.row(0).norm(), n1 = m.row(1).norm();
  return m.determinant() / (n0 * n1);
}

}  // namespace

std::vector<double> oracle_stepped_beam(const BeamModel& bm, int n_modes, double alpha_max, double grid_step) {
  validate(bm);
  if (bm.lambda0 != 0.0 || bm.lambda1 != 0.0) {
    throw InvalidInput("the stepped-beam oracle requires zero crack intensities");
  }
  std::vector<double> roots;
  Real a = grid_step;
  Real fa = oracle_det(bm, a);
  for (long i = 2; static_cast<int>(roots.size()) < n_modes; ++i) {
    const Real b = grid_step * static_cast<Real>(i);
    if (b > alpha_max) {
      break;
    }
    const Real fb = oracle_det(bm, b);
    if ((fa < 0) != (fb < 0) || fb == 0) {
      Real lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-14L; ++it) {
        const Real mid = (lo + hi) / 2;
        const Real fm = oracle_det(bm, mid);
        if ((fm < 0) == (flo < 0) && fm != 0) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(static_cast<double>((lo + hi) / 2));
    }
    a = b;
    fa = fb;
  }
  if (static_cast<int>(roots.size()) < n_modes) {
    std::ostringstream os;
    os << "oracle found only " << roots.size() << " of " << n_modes << " frequencies";
    throw FrequencyShortfall(os.str(), roots);
  }
  return roots;
}

}  // namespace distbeam::beam
