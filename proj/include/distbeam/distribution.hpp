#pragma once

#include <string>
#include <utility>
#include <vector>

#include "distbeam/smooth_expr.hpp"

namespace distbeam {

/// coeff * delta^{(order)} located at `location`.
struct DeltaTerm {
  double location;
  int order;
  double coeff;

  friend bool operator==(const DeltaTerm&, const DeltaTerm&) = default;
};

struct AlgebraOptions {
  int max_delta_order = 8;
  double zero_threshold = 1e-12;
};

/// Unchecked parts of a distribution, as accepted by `normalize`.
/// pieces[i] lives on (breakpoints[i-1], breakpoints[i]) with the outer
/// intervals unbounded, so pieces.size() == breakpoints.size() + 1.
struct RawDistribution {
  std::vector<double> breakpoints;
  std::vector<SmoothExpr> pieces;
  std::vector<DeltaTerm> deltas;
};

/// Piecewise-smooth function plus finitely many delta terms, kept in
/// canonical form: strictly increasing breakpoints, every delta sitting on a
/// breakpoint, one delta per (location, order), no removable breakpoints.
class Distribution {
 public:
  Distribution();
  explicit Distribution(SmoothExpr smooth);

  /// H(x - x0)
  static Distribution heaviside(double x0);
  /// H(x0 - x)
  static Distribution heaviside_left(double x0);
  static Distribution delta(double x0, int order = 0, double coeff = 1.0);
  /// H(x0 - x) left + H(x - x0) right
  static Distribution piecewise(double x0, SmoothExpr left, SmoothExpr right);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<SmoothExpr>& pieces() const noexcept { return pieces_; }
  /// Sorted by (location, order).
  const std::vector<DeltaTerm>& deltas() const noexcept { return deltas_; }

  /// Smooth piece on the open interval containing x, or to the left/right of
  /// x when x is a breakpoint.
  const SmoothExpr& piece_left_of(double x) const;
  const SmoothExpr& piece_right_of(double x) const;

  double delta_coeff(double location, int order) const;
  bool is_zero() const noexcept;

  friend Distribution normalize(RawDistribution raw, const AlgebraOptions& opts);

 private:
  std::vector<double> breakpoints_;
  std::vector<SmoothExpr> pieces_;
  std::vector<DeltaTerm> deltas_;
};

Distribution normalize(RawDistribution raw, const AlgebraOptions& opts = {});

Distribution add(const Distribution& f, const Distribution& g);
Distribution scale(const Distribution& f, double c);

/// g * F for smooth g: pieces are multiplied pointwise and every delta
/// derivative is expanded as
///   g delta^{(n)} = (-1)^n sum_k (-1)^k C(n,k) g^{(n-k)}(xi) delta^{(k)}.
Distribution dual_mul_smooth(const SmoothExpr& g, const Distribution& f);

/// The non-commutative product on the common refinement of breakpoints:
/// deltas of F meet the piece of G to their right, deltas of G meet the
/// piece of F to their left, and delta-by-delta products vanish.
Distribution star(const Distribution& f, const Distribution& g);

/// n-th distributional derivative. Throws OrderOverflow when a delta would
/// exceed opts.max_delta_order.
Distribution derivative(const Distribution& f, int n = 1, const AlgebraOptions& opts = {});

/// 0 for regular distributions, otherwise 1 + highest delta order.
int order(const Distribution& f);
std::vector<double> sing_supp(const Distribution& f);

/// One-sided limits of the regular part at x; deltas are ignored.
std::pair<double, double> eval_limits(const Distribution& f, double x);

/// Largest |coefficient| among delta terms and piece polynomials.
double max_coefficient(const Distribution& f);

/// max_coefficient(f - g): coefficient-wise distance used by the property
/// checks.
double coefficient_distance(const Distribution& f, const Distribution& g);

inline Distribution operator+(const Distribution& f, const Distribution& g) { return add(f, g); }
inline Distribution operator-(const Distribution& f, const Distribution& g) {
  return add(f, scale(g, -1.0));
}
inline Distribution operator*(double c, const Distribution& f) { return scale(f, c); }

std::string to_string(const Distribution& f);

}  // namespace distbeam
