#include "distbeam/beam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distbeam/errors.hpp"

namespace distbeam::beam {

namespace {

using Real = long double;
using Matrix6 = Eigen::Matrix<Real, 6, 6>;
using Vector6 = Eigen::Matrix<Real, 6, 1>;

constexpr int kShapeSamples = 1001;
constexpr double kMinCandidate = 1e-8;  // |det| below which a grid-local minimum is refined

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double fm = f(mid);
    if (fm == 0.0) {
      return mid;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min_abs(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = std::abs(f(c));
  double fd = std::abs(f(d));
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = std::abs(f(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = std::abs(f(d));
    }
    if (c >= d) {
      break;
    }
  }
  return 0.5 * (a + b);
}

// Null direction of a square matrix after row and column equilibration.
// Returns the vector in the original variables and sigma_min / sigma_max.
template <int N>
std::pair<Eigen::Matrix<Real, N, 1>, Real> null_direction(const Eigen::Matrix<Real, N, N>& raw) {
  Eigen::Matrix<Real, N, N> m = row_normalized(raw);
  Eigen::Matrix<Real, N, 1> col_scale;
  for (int c = 0; c < N; ++c) {
    Real s = m.col(c).cwiseAbs().maxCoeff();
    col_scale(c) = (s > 0) ? s : Real(1);
    m.col(c) /= col_scale(c);
  }
  Eigen::JacobiSVD<Eigen::Matrix<Real, N, N>> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Matrix<Real, N, 1> y = svd.matrixV().col(N - 1);
  Eigen::Matrix<Real, N, 1> x = y.cwiseQuotient(col_scale);
  const Real rel = (sv(0) > 0) ? sv(N - 1) / sv(0) : Real(1);
  return {x, rel};
}

Mode assemble_mode(const BeamModel& bm, double alpha, const Vector6& x, double residual) {
  Mode mode;
  mode.alpha = alpha;
  mode.beta = beta(bm);
  mode.bc = bm.bc;
  mode.residual = residual;
  auto& c = mode.consts;
  if (bm.bc == BoundaryKind::PinnedPinned) {
    // B1 = D1 = 0
    c << double(x(0)), 0.0, double(x(1)), 0.0, double(x(2)), double(x(3)), double(x(4)), double(x(5));
  } else {
    // A1 = -C1, B1 = -D1
    c << double(-x(0)), double(-x(1)), double(x(0)), double(x(1)), double(x(2)), double(x(3)),
        double(x(4)), double(x(5));
  }

  double sup = 0.0;
  for (int i = 0; i < kShapeSamples; ++i) {
    const double xs = static_cast<double>(i) / (kShapeSamples - 1);
    sup = std::max(sup, std::abs(eval_mode(mode, bm, xs)));
  }
  if (sup > 0.0) {
    c /= sup;
  }
  Eigen::Index lead = 0;
  for (Eigen::Index i = 1; i < c.size(); ++i) {
    if (std::abs(c(i)) > std::abs(c(lead))) {
      lead = i;
    }
  }
  if (c(lead) < 0.0) {
    c = -c;
  }
  return mode;
}

}  // namespace

void validate(const BeamModel& bm) {
  auto fail = [](const std::string& what) { throw InvalidInput(what); };
  if (!(bm.stiffness > 0.0) || !std::isfinite(bm.stiffness)) fail("stiffness A must be positive");
  if (!(bm.ratio > 0.0) || !std::isfinite(bm.ratio)) fail("stiffness ratio k must be positive");
  if (!(bm.mass > 0.0) || !std::isfinite(bm.mass)) fail("mass per unit length m must be positive");
  if (!(bm.xi0 > 0.0 && bm.xi0 < 1.0)) fail("crack position xi0 must lie strictly inside (0, 1)");
  if (!(bm.lambda0 >= 0.0) || !std::isfinite(bm.lambda0)) fail("lambda0 must be non-negative");
  if (!(bm.lambda1 >= 0.0) || !std::isfinite(bm.lambda1)) fail("lambda1 must be non-negative");
}

const char* to_string(BoundaryKind bc) {
  return bc == BoundaryKind::PinnedPinned ? "pp" : "cc";
}

double s_param(const BeamModel& bm) { return (bm.lambda0 + bm.lambda1) / (bm.ratio + 1.0); }

double alpha_to_omega(const BeamModel& bm, double alpha) {
  return alpha * alpha * std::sqrt(bm.stiffness / bm.mass);
}

double time_factor(double w, double P, double Q, double t) { return P * std::cos(w * t) + Q * std::sin(w * t); }

interface::CoeffSet to_coeffset(const BeamModel& bm, double w) {
  validate(bm);
  interface::CoeffSet c;
  c.xi0 = bm.xi0;
  c.w = w;
  c.a_minus_0 = SmoothExpr{1.0};
  c.a_plus_0 = SmoothExpr{};
  c.a_minus_1 = SmoothExpr{};
  c.a_plus_1 = SmoothExpr{bm.ratio};
  c.A(0, 0) = -bm.ratio * bm.lambda1;
  c.A(1, 0) = -bm.lambda0;
  c.b_minus = SmoothExpr{bm.mass / bm.stiffness};
  c.b_plus = SmoothExpr{bm.mass / bm.stiffness};
  return c;
}

interface::CoeffSet to_coeffset_general(const BeamModel& bm, const Eigen::Matrix2d& split, double w) {
  validate(bm);
  constexpr double kTol = 1e-12;
  if (std::abs(split(0, 0) + split(1, 0) - bm.lambda0) > kTol * std::max(1.0, bm.lambda0) ||
      std::abs(split(0, 1) + split(1, 1) - bm.lambda1) > kTol * std::max(1.0, bm.lambda1)) {
    throw InvalidInput("crack split must satisfy l00 + l10 = lambda0 and l01 + l11 = lambda1");
  }
  interface::CoeffSet c;
  c.xi0 = bm.xi0;
  c.w = w;
  c.a_minus_0 = SmoothExpr{0.5};
  c.a_plus_0 = SmoothExpr{0.5 * bm.ratio};
  c.a_minus_1 = SmoothExpr{0.5};
  c.a_plus_1 = SmoothExpr{0.5 * bm.ratio};
  for (int i = 0; i < 2; ++i) {
    c.A(i, 0) = -(split(i, 0) + bm.ratio * split(i, 1));
  }
  c.b_minus = SmoothExpr{bm.mass / bm.stiffness};
  c.b_plus = SmoothExpr{bm.mass / bm.stiffness};
  return c;
}

Eigen::Vector4d interface_residual(const BeamModel& bm, const Eigen::Vector4d& left,
                                   const Eigen::Vector4d& right) {
  const double k = bm.ratio;
  const double S = s_param(bm);
  return Eigen::Vector4d{left(3) - k * right(3), left(2) - k * right(2), left(1) + S * left(2) - right(1),
                         left(0) - right(0)};
}

double char_det(const BeamModel& bm, double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidInput("alpha must be positive");
  }
  const Matrix6 m = row_normalized(build_M<Real>(bm, Real(alpha)));
  return static_cast<double>(m.partialPivLu().determinant());
}

std::vector<Root> scan_roots(const std::function<double(double)>& f, const SearchOptions& opts, int max_roots) {
  if (!(opts.grid_step > 0.0) || !(opts.alpha_max > opts.grid_step) || !(opts.tol > 0.0)) {
    throw InvalidInput("search needs grid_step > 0, alpha_max > grid_step and tol > 0");
  }
  const auto n = static_cast<long>(std::floor(opts.alpha_max / opts.grid_step + 1e-9));
  std::vector<Root> roots;
  auto add_root = [&](double a, bool near_double) {
    for (const Root& r : roots) {
      if (std::abs(r.alpha - a) < 10.0 * opts.tol) {
        return;
      }
    }
    roots.push_back(Root{a, near_double});
  };
  auto grid = [&](long i) { return opts.grid_step * static_cast<double>(i); };

  double a_prev2 = 0.0, f_prev2 = 0.0;
  double a_prev = grid(1);
  double f_prev = f(a_prev);
  if (f_prev == 0.0) {
    add_root(a_prev, false);
  }
  for (long i = 2; i <= n; ++i) {
    const double a = grid(i);
    const double fa = f(a);
    if (fa == 0.0) {
      add_root(a, false);
    } else if (f_prev != 0.0 && (fa < 0.0) != (f_prev < 0.0)) {
      add_root(bisect(f, a_prev, a, f_prev, opts.tol), false);
    } else if (i >= 3 && std::abs(f_prev) < std::abs(f_prev2) && std::abs(f_prev) <= std::abs(fa) &&
               std::abs(f_prev) < kMinCandidate && (f_prev2 < 0.0) == (f_prev < 0.0)) {
      // Grid-local minimum of |f| without a sign change: a double root or a
      // pair of roots closer than the grid step.
      const double am = golden_min_abs(f, a_prev2, a, opts.tol);
      const double fm = std::abs(f(am));
      if (fm <= 1e-6 * std::max(std::abs(f_prev2), std::abs(fa))) {
        add_root(am, true);
      }
    }
    a_prev2 = a_prev;
    f_prev2 = f_prev;
    a_prev = a;
    f_prev = fa;
    if (max_roots > 0 && static_cast<int>(roots.size()) >= max_roots) {
      break;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& l, const Root& r) { return l.alpha < r.alpha; });
  return roots;
}

namespace {

std::vector<double> first_roots(const std::function<double(double)>& f, const SearchOptions& opts) {
  if (opts.n_modes < 1) {
    throw InvalidInput("n_modes must be at least 1");
  }
  const std::vector<Root> roots = scan_roots(f, opts, opts.n_modes);
  std::vector<double> out;
  for (const Root& r : roots) {
    if (static_cast<int>(out.size()) < opts.n_modes) {
      out.push_back(r.alpha);
    }
  }
  if (static_cast<int>(out.size()) < opts.n_modes) {
    std::ostringstream os;
    os << "found only " << out.size() << " of " << opts.n_modes << " frequencies below alpha_max = " << opts.alpha_max;
    throw FrequencyShortfall(os.str(), out);
  }
  return out;
}

}  // namespace

std::vector<double> find_frequencies(const BeamModel& bm, const SearchOptions& opts) {
  validate(bm);
  return first_roots([&bm](double a) { return char_det(bm, a); }, opts);
}

Mode least_singular_mode(const BeamModel& bm, double alpha) {
  validate(bm);
  if (!(alpha > 0.0)) {
    throw InvalidInput("alpha must be positive");
  }
  const auto [x, rel] = null_direction<6>(build_M<Real>(bm, Real(alpha)));
  return assemble_mode(bm, alpha, x, static_cast<double>(rel));
}

Mode relaxed_mode(const BeamModel& bm, double alpha) {
  validate(bm);
  if (!(alpha > 0.0)) {
    throw InvalidInput("alpha must be positive");
  }
  Matrix6 m = build_M<Real>(bm, Real(alpha));
  m.row(5).setZero();
  const auto [x, rel] = null_direction<6>(m);
  return assemble_mode(bm, alpha, x, static_cast<double>(rel));
}

Mode mode_shape(const BeamModel& bm, double alpha, double threshold) {
  Mode mode = least_singular_mode(bm, alpha);
  if (mode.residual > threshold) {
    std::ostringstream os;
    os.precision(6);
    os << "alpha = " << alpha << " is not a characteristic frequency: relative sigma_min = " << mode.residual
       << ", |char_det| = " << std::abs(char_det(bm, alpha));
    throw NotAFrequency(os.str(), mode.residual);
  }
  return mode;
}

Eigen::Vector4d piece_state(const Mode& mode, int side, double x) {
  const double rate = (side == 0) ? mode.alpha : mode.alpha * mode.beta;
  const auto coeffs = mode.consts.segment<4>(side == 0 ? 0 : 4);
  Eigen::Vector4d out;
  for (int n = 0; n < 4; ++n) {
    out(n) = coeffs.dot(basis_derivative<double>(rate, x, n));
  }
  return out;
}

double eval_mode(const Mode& mode, const BeamModel& bm, double x, int derivative) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidInput("x must lie in [0, 1]");
  }
  const int side = (x <= bm.xi0) ? 0 : 1;
  const double rate = (side == 0) ? mode.alpha : mode.alpha * mode.beta;
  return mode.consts.segment<4>(side == 0 ? 0 : 4).dot(basis_derivative<double>(rate, x, derivative));
}

std::pair<SmoothExpr, SmoothExpr> mode_pieces(const Mode& mode) {
  auto piece = [](const auto& c, double rate) {
    return SmoothExpr{c(0)} * SmoothExpr::sin(rate) + SmoothExpr{c(1)} * SmoothExpr::cos(rate) +
           SmoothExpr{c(2)} * SmoothExpr::sinh(rate) + SmoothExpr{c(3)} * SmoothExpr::cosh(rate);
  };
  return {piece(mode.consts.head<4>(), mode.alpha), piece(mode.consts.tail<4>(), mode.alpha * mode.beta)};
}

Eigen::Vector4d interface_residual(const Mode& mode, const BeamModel& bm) {
  return interface_residual(bm, piece_state(mode, 0, bm.xi0), piece_state(mode, 1, bm.xi0));
}

Eigen::Matrix<double, 8, 8> interface_system(const BeamModel& bm, const interface::InterfaceMatrices& m,
                                              double alpha) {
  const double rate1 = alpha;
  const double rate2 = alpha * beta(bm);
  const int n_left = (bm.bc == BoundaryKind::PinnedPinned) ? 2 : 1;
  Eigen::Matrix<double, 8, 8> sys = Eigen::Matrix<double, 8, 8>::Zero();
  sys.block<1, 4>(0, 0) = basis_derivative<double>(rate1, 0.0, 0).transpose();
  sys.block<1, 4>(1, 0) = basis_derivative<double>(rate1, 0.0, n_left).transpose();
  sys.block<1, 4>(2, 4) = basis_derivative<double>(rate2, 1.0, 0).transpose();
  sys.block<1, 4>(3, 4) = basis_derivative<double>(rate2, 1.0, n_left).transpose();

  Eigen::Matrix4d left, right;
  for (int n = 0; n < 4; ++n) {
    left.row(n) = basis_derivative<double>(rate1, bm.xi0, n).transpose();
    right.row(n) = basis_derivative<double>(rate2, bm.xi0, n).transpose();
  }
  sys.block<4, 4>(4, 0) = m.A * left;
  sys.block<4, 4>(4, 4) = -m.B * right;
  return sys;
}

double split_char_det(const BeamModel& bm, const Eigen::Matrix2d& split, double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidInput("alpha must be positive");
  }
  const interface::CoeffSet c = to_coeffset_general(bm, split, alpha_to_omega(bm, alpha));
  const Eigen::Matrix<double, 8, 8> sys = row_normalized(interface_system(bm, interface::build_interface_matrices(c), alpha));
  return sys.partialPivLu().determinant();
}

std::vector<double> find_frequencies_split(const BeamModel& bm, const Eigen::Matrix2d& split,
                                           const SearchOptions& opts) {
  validate(bm);
  // Validates the split once up front.
  (void)to_coeffset_general(bm, split, 0.0);
  return first_roots([&](double a) { return split_char_det(bm, split, a); }, opts);
}

}  // namespace distbeam::beam
