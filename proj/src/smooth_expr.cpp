#include "distbeam/smooth_expr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace distbeam {

namespace {

void trim(std::vector<double>& poly) {
  while (!poly.empty() && poly.back() == 0.0) {
    poly.pop_back();
  }
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    return {};
  }
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

std::vector<double> poly_scale(std::vector<double> p, double c) {
  for (double& v : p) {
    v *= c;
  }
  return p;
}

std::vector<double> poly_derivative(const std::vector<double>& p) {
  if (p.size() <= 1) {
    return {};
  }
  std::vector<double> out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) {
    out[i - 1] = static_cast<double>(i) * p[i];
  }
  return out;
}

double poly_eval(const std::vector<double>& p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

// Brings a term to normal form: zero-rate atoms and exp phases become
// polynomial scale factors, negative rates are flipped, exps are merged.
SmoothExpr::Term simplify_term(SmoothExpr::Term term) {
  double scale = 1.0;
  double exp_rate = 0.0;
  bool has_exp = false;
  std::vector<Atom> kept;
  kept.reserve(term.factors.size());

  for (Atom a : term.factors) {
    if (a.rate == 0.0) {
      scale *= eval(a, 0.0);
      continue;
    }
    if (a.kind == AtomKind::Exp) {
      scale *= std::exp(a.phase);
      exp_rate += a.rate;
      has_exp = true;
      continue;
    }
    if (a.rate < 0.0) {
      a.rate = -a.rate;
      a.phase = -a.phase;
      if (a.kind == AtomKind::Sin || a.kind == AtomKind::Sinh) {
        scale = -scale;
      }
    }
    a.phase += 0.0;  // -0.0 -> 0.0
    kept.push_back(a);
  }
  if (has_exp && exp_rate != 0.0) {
    kept.push_back(Atom{AtomKind::Exp, exp_rate, 0.0});
  }
  std::sort(kept.begin(), kept.end(), [](const Atom& l, const Atom& r) { return l < r; });

  term.factors = std::move(kept);
  if (scale != 1.0) {
    term.poly = poly_scale(std::move(term.poly), scale);
  }
  trim(term.poly);
  return term;
}

Atom atom_derivative(const Atom& a, double& sign) {
  switch (a.kind) {
    case AtomKind::Sin:
      sign = 1.0;
      return {AtomKind::Cos, a.rate, a.phase};
    case AtomKind::Cos:
      sign = -1.0;
      return {AtomKind::Sin, a.rate, a.phase};
    case AtomKind::Sinh:
      sign = 1.0;
      return {AtomKind::Cosh, a.rate, a.phase};
    case AtomKind::Cosh:
      sign = 1.0;
      return {AtomKind::Sinh, a.rate, a.phase};
    case AtomKind::Exp:
      sign = 1.0;
      return a;
  }
  sign = 0.0;
  return a;
}

const char* atom_name(AtomKind k) {
  switch (k) {
    case AtomKind::Sin: return "sin";
    case AtomKind::Cos: return "cos";
    case AtomKind::Sinh: return "sinh";
    case AtomKind::Cosh: return "cosh";
    case AtomKind::Exp: return "exp";
  }
  return "?";
}

}  // namespace

double eval(const Atom& atom, double x) {
  const double arg = atom.rate * x + atom.phase;
  switch (atom.kind) {
    case AtomKind::Sin: return std::sin(arg);
    case AtomKind::Cos: return std::cos(arg);
    case AtomKind::Sinh: return std::sinh(arg);
    case AtomKind::Cosh: return std::cosh(arg);
    case AtomKind::Exp: return std::exp(arg);
  }
  return 0.0;
}

SmoothExpr::SmoothExpr(double constant) {
  if (constant != 0.0) {
    terms_.push_back(Term{{constant}, {}});
  }
}

SmoothExpr SmoothExpr::from_terms(std::vector<Term> terms) {
  std::map<std::vector<Atom>, std::vector<double>> merged;
  for (Term& raw : terms) {
    Term t = simplify_term(std::move(raw));
    if (t.poly.empty()) {
      continue;
    }
    auto& acc = merged[t.factors];
    if (acc.size() < t.poly.size()) {
      acc.resize(t.poly.size(), 0.0);
    }
    for (std::size_t i = 0; i < t.poly.size(); ++i) {
      acc[i] += t.poly[i];
    }
  }
  SmoothExpr out;
  for (auto& [factors, poly] : merged) {
    trim(poly);
    if (!poly.empty()) {
      out.terms_.push_back(Term{std::move(poly), factors});
    }
  }
  return out;
}

SmoothExpr SmoothExpr::atom(AtomKind kind, double rate, double phase) {
  return from_terms({Term{{1.0}, {Atom{kind, rate, phase}}}});
}

SmoothExpr SmoothExpr::x() { return polynomial({0.0, 1.0}); }

SmoothExpr SmoothExpr::polynomial(std::vector<double> coeffs) {
  return from_terms({Term{std::move(coeffs), {}}});
}

SmoothExpr SmoothExpr::sin(double rate, double phase) { return atom(AtomKind::Sin, rate, phase); }
SmoothExpr SmoothExpr::cos(double rate, double phase) { return atom(AtomKind::Cos, rate, phase); }
SmoothExpr SmoothExpr::sinh(double rate, double phase) { return atom(AtomKind::Sinh, rate, phase); }
SmoothExpr SmoothExpr::cosh(double rate, double phase) { return atom(AtomKind::Cosh, rate, phase); }
SmoothExpr SmoothExpr::exp(double rate, double phase) { return atom(AtomKind::Exp, rate, phase); }

double SmoothExpr::operator()(double x) const {
  double sum = 0.0;
  for (const Term& t : terms_) {
    double v = poly_eval(t.poly, x);
    for (const Atom& a : t.factors) {
      v *= eval(a, x);
    }
    sum += v;
  }
  return sum;
}

SmoothExpr SmoothExpr::derivative(int n) const {
  SmoothExpr current = *this;
  for (int step = 0; step < n && !current.is_zero(); ++step) {
    std::vector<Term> next;
    for (const Term& t : current.terms_) {
      next.push_back(Term{poly_derivative(t.poly), t.factors});
      for (std::size_t f = 0; f < t.factors.size(); ++f) {
        double sign = 0.0;
        Term d{t.poly, t.factors};
        d.factors[f] = atom_derivative(t.factors[f], sign);
        d.poly = poly_scale(std::move(d.poly), sign * t.factors[f].rate);
        next.push_back(std::move(d));
      }
    }
    current = from_terms(std::move(next));
  }
  return current;
}

double SmoothExpr::derivative_at(double x, int n) const { return derivative(n)(x); }

bool SmoothExpr::is_polynomial() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.factors.empty(); });
}

double SmoothExpr::max_coefficient() const noexcept {
  double m = 0.0;
  for (const Term& t : terms_) {
    for (double c : t.poly) {
      m = std::max(m, std::abs(c));
    }
  }
  return m;
}

SmoothExpr operator+(const SmoothExpr& lhs, const SmoothExpr& rhs) {
  std::vector<SmoothExpr::Term> all = lhs.terms_;
  all.insert(all.end(), rhs.terms_.begin(), rhs.terms_.end());
  return SmoothExpr::from_terms(std::move(all));
}

SmoothExpr operator-(const SmoothExpr& e) {
  SmoothExpr out = e;
  for (auto& t : out.terms_) {
    t.poly = poly_scale(std::move(t.poly), -1.0);
  }
  return out;
}

SmoothExpr operator-(const SmoothExpr& lhs, const SmoothExpr& rhs) { return lhs + (-rhs); }

SmoothExpr operator*(const SmoothExpr& lhs, const SmoothExpr& rhs) {
  std::vector<SmoothExpr::Term> all;
  all.reserve(lhs.terms_.size() * rhs.terms_.size());
  for (const auto& a : lhs.terms_) {
    for (const auto& b : rhs.terms_) {
      SmoothExpr::Term t{poly_mul(a.poly, b.poly), a.factors};
      t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
      all.push_back(std::move(t));
    }
  }
  return SmoothExpr::from_terms(std::move(all));
}

std::span<const double> probe_points() {
  static const std::array<double, 17> points = [] {
    std::array<double, 17> p{};
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = -4.0 + 0.5 * static_cast<double>(i);
    }
    return p;
  }();
  return points;
}

bool equivalent(const SmoothExpr& f, const SmoothExpr& g, double tol) {
  const SmoothExpr diff = f - g;
  if (diff.is_zero()) {
    return true;
  }
  for (double x : probe_points()) {
    const double fx = f(x);
    const double gx = g(x);
    const double dx = diff(x);
    if (!std::isfinite(fx) || !std::isfinite(gx) || !std::isfinite(dx)) {
      return false;
    }
    const double scale = std::max({1.0, std::abs(fx), std::abs(gx)});
    if (std::abs(dx) > tol * scale) {
      return false;
    }
  }
  return true;
}

std::string to_string(const SmoothExpr& e) {
  if (e.is_zero()) {
    return "0";
  }
  std::ostringstream os;
  os.precision(12);
  bool first_term = true;
  for (const auto& t : e.terms()) {
    if (!first_term) {
      os << " + ";
    }
    first_term = false;
    os << "(";
    bool first = true;
    for (std::size_t i = 0; i < t.poly.size(); ++i) {
      if (t.poly[i] == 0.0) {
        continue;
      }
      if (!first) {
        os << " + ";
      }
      first = false;
      os << t.poly[i];
      if (i == 1) {
        os << "*x";
      } else if (i > 1) {
        os << "*x^" << i;
      }
    }
    os << ")";
    for (const Atom& a : t.factors) {
      os << "*" << atom_name(a.kind) << "(" << a.rate << "*x";
      if (a.phase != 0.0) {
        os << (a.phase > 0 ? "+" : "") << a.phase;
      }
      os << ")";
    }
  }
  return os.str();
}

}  // namespace distbeam
