#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace distbeam {

enum class AtomKind : std::uint8_t { Sin, Cos, Sinh, Cosh, Exp };

/// One transcendental factor f(rate * x + phase).
struct Atom {
  AtomKind kind;
  double rate;
  double phase;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

double eval(const Atom& atom, double x);

/// Closed-form smooth function on the real line.
///
/// Stored as a sum of terms, each a real polynomial times a (sorted) product
/// of sin/cos/sinh/cosh/exp atoms with affine arguments. The set is closed
/// under +, *, scaling and d/dx, so exact derivatives of any order are
/// available; that is what the distribution product needs at breakpoints.
///
/// Terms with identical factor lists are merged, exp phases are folded into
/// the polynomial, and zero-rate atoms are folded to constants. This is a
/// normal form up to trigonometric identities, not a full canonical form;
/// use `equivalent` for value-level comparison.
class SmoothExpr {
 public:
  struct Term {
    std::vector<double> poly;  // poly[i] multiplies x^i; no trailing zeros
    std::vector<Atom> factors;  // sorted

    friend bool operator==(const Term&, const Term&) = default;
  };

  SmoothExpr() = default;
  SmoothExpr(double constant);  // NOLINT(google-explicit-constructor)

  static SmoothExpr x();
  static SmoothExpr polynomial(std::vector<double> coeffs);
  static SmoothExpr sin(double rate, double phase = 0.0);
  static SmoothExpr cos(double rate, double phase = 0.0);
  static SmoothExpr sinh(double rate, double phase = 0.0);
  static SmoothExpr cosh(double rate, double phase = 0.0);
  static SmoothExpr exp(double rate, double phase = 0.0);

  double operator()(double x) const;

  SmoothExpr derivative(int n = 1) const;
  double derivative_at(double x, int n) const;

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_polynomial() const noexcept;
  std::span<const Term> terms() const noexcept { return terms_; }

  /// Largest |coefficient| over all term polynomials.
  double max_coefficient() const noexcept;

  friend SmoothExpr operator+(const SmoothExpr& lhs, const SmoothExpr& rhs);
  friend SmoothExpr operator-(const SmoothExpr& lhs, const SmoothExpr& rhs);
  friend SmoothExpr operator*(const SmoothExpr& lhs, const SmoothExpr& rhs);
  friend SmoothExpr operator-(const SmoothExpr& e);

  SmoothExpr& operator+=(const SmoothExpr& rhs) { return *this = *this + rhs; }
  SmoothExpr& operator-=(const SmoothExpr& rhs) { return *this = *this - rhs; }
  SmoothExpr& operator*=(const SmoothExpr& rhs) { return *this = *this * rhs; }

  friend bool operator==(const SmoothExpr&, const SmoothExpr&) = default;

 private:
  static SmoothExpr atom(AtomKind kind, double rate, double phase);
  static SmoothExpr from_terms(std::vector<Term> terms);

  std::vector<Term> terms_;
};

/// Fixed probe grid used by `equivalent`: 17 points from -4 to 4.
std::span<const double> probe_points();

/// Structural equality after simplification, falling back to value
/// comparison on the probe grid: |f - g| <= tol * max(1, |f|, |g|).
bool equivalent(const SmoothExpr& f, const SmoothExpr& g, double tol = 1e-10);

std::string to_string(const SmoothExpr& e);

}  // namespace distbeam
