#include "distbeam/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "distbeam/errors.hpp"

namespace distbeam {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

std::size_t interval_index(const std::vector<double>& bps, double left_end, bool unbounded_left) {
  if (unbounded_left) {
    return 0;
  }
  return static_cast<std::size_t>(std::upper_bound(bps.begin(), bps.end(), left_end) - bps.begin());
}

std::vector<double> merged_breakpoints(const Distribution& f, const Distribution& g) {
  std::vector<double> u;
  u.reserve(f.breakpoints().size() + g.breakpoints().size());
  std::set_union(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
                 g.breakpoints().end(), std::back_inserter(u));
  return u;
}

// Coefficients c_k of delta^{(k)}, k = 0..n, in the expansion of g * delta^{(n)}_xi.
std::vector<double> expand_delta(const SmoothExpr& g, double xi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  SmoothExpr deriv = g;
  // deriv holds g^{(n-k)} while k runs downward from n.
  for (int k = n; k >= 0; --k) {
    const double sign = ((n + k) % 2 == 0) ? 1.0 : -1.0;
    out[static_cast<std::size_t>(k)] = sign * binomial(n, k) * deriv(xi);
    if (k > 0) {
      deriv = deriv.derivative();
    }
  }
  return out;
}

}  // namespace

Distribution::Distribution() : pieces_{SmoothExpr{}} {}

Distribution::Distribution(SmoothExpr smooth) : pieces_{std::move(smooth)} {}

Distribution Distribution::heaviside(double x0) {
  return normalize(RawDistribution{{x0}, {SmoothExpr{}, SmoothExpr{1.0}}, {}});
}

Distribution Distribution::heaviside_left(double x0) {
  return normalize(RawDistribution{{x0}, {SmoothExpr{1.0}, SmoothExpr{}}, {}});
}

Distribution Distribution::delta(double x0, int order, double coeff) {
  return normalize(RawDistribution{{x0}, {SmoothExpr{}, SmoothExpr{}}, {DeltaTerm{x0, order, coeff}}});
}

Distribution Distribution::piecewise(double x0, SmoothExpr left, SmoothExpr right) {
  return normalize(RawDistribution{{x0}, {std::move(left), std::move(right)}, {}});
}

const SmoothExpr& Distribution::piece_left_of(double x) const {
  const auto idx = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
  return pieces_[static_cast<std::size_t>(idx)];
}

const SmoothExpr& Distribution::piece_right_of(double x) const {
  const auto idx = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
  return pieces_[static_cast<std::size_t>(idx)];
}

double Distribution::delta_coeff(double location, int order) const {
  for (const DeltaTerm& d : deltas_) {
    if (d.location == location && d.order == order) {
      return d.coeff;
    }
  }
  return 0.0;
}

bool Distribution::is_zero() const noexcept {
  return deltas_.empty() && breakpoints_.empty() && pieces_.front().is_zero();
}

Distribution normalize(RawDistribution raw, const AlgebraOptions& opts) {
  if (raw.pieces.size() != raw.breakpoints.size() + 1) {
    throw InvalidInput("distribution needs exactly one more piece than breakpoints");
  }
  for (std::size_t i = 0; i < raw.breakpoints.size(); ++i) {
    if (!std::isfinite(raw.breakpoints[i])) {
      throw InvalidInput("breakpoints must be finite");
    }
    if (i > 0 && !(raw.breakpoints[i - 1] < raw.breakpoints[i])) {
      throw InvalidInput("breakpoints must be strictly increasing");
    }
  }

  // Deltas off the breakpoint set split the interval they land in.
  for (const DeltaTerm& d : raw.deltas) {
    if (!std::isfinite(d.location) || !std::isfinite(d.coeff)) {
      throw InvalidInput("delta terms must have finite location and coefficient");
    }
    if (d.order < 0) {
      throw InvalidInput("delta order must be non-negative");
    }
    if (d.order > opts.max_delta_order) {
      throw OrderOverflow("delta order " + std::to_string(d.order) + " exceeds maximum " +
                          std::to_string(opts.max_delta_order));
    }
    auto it = std::lower_bound(raw.breakpoints.begin(), raw.breakpoints.end(), d.location);
    if (it == raw.breakpoints.end() || *it != d.location) {
      const auto pos = it - raw.breakpoints.begin();
      raw.breakpoints.insert(it, d.location);
      SmoothExpr copy = raw.pieces[static_cast<std::size_t>(pos)];
      raw.pieces.insert(raw.pieces.begin() + pos + 1, std::move(copy));
    }
  }

  std::map<std::pair<double, int>, double> merged;
  for (const DeltaTerm& d : raw.deltas) {
    merged[{d.location, d.order}] += d.coeff;
  }

  Distribution out;
  for (const auto& [key, coeff] : merged) {
    if (std::abs(coeff) > opts.zero_threshold) {
      out.deltas_.push_back(DeltaTerm{key.first, key.second, coeff});
    }
  }

  out.pieces_.clear();
  out.pieces_.push_back(std::move(raw.pieces.front()));
  for (std::size_t i = 0; i < raw.breakpoints.size(); ++i) {
    const double bp = raw.breakpoints[i];
    const bool has_delta = std::any_of(out.deltas_.begin(), out.deltas_.end(),
                                       [bp](const DeltaTerm& d) { return d.location == bp; });
    SmoothExpr& right = raw.pieces[i + 1];
    if (!has_delta && equivalent(out.pieces_.back(), right)) {
      continue;
    }
    out.breakpoints_.push_back(bp);
    out.pieces_.push_back(std::move(right));
  }
  return out;
}

Distribution add(const Distribution& f, const Distribution& g) {
  RawDistribution raw;
  raw.breakpoints = merged_breakpoints(f, g);
  for (std::size_t i = 0; i <= raw.breakpoints.size(); ++i) {
    const bool first = (i == 0);
    const double left_end = first ? 0.0 : raw.breakpoints[i - 1];
    raw.pieces.push_back(f.pieces()[interval_index(f.breakpoints(), left_end, first)] +
                         g.pieces()[interval_index(g.breakpoints(), left_end, first)]);
  }
  raw.deltas = f.deltas();
  raw.deltas.insert(raw.deltas.end(), g.deltas().begin(), g.deltas().end());
  return normalize(std::move(raw));
}

Distribution scale(const Distribution& f, double c) {
  if (c == 0.0) {
    return Distribution{};
  }
  RawDistribution raw{f.breakpoints(), {}, f.deltas()};
  for (const SmoothExpr& p : f.pieces()) {
    raw.pieces.push_back(p * SmoothExpr{c});
  }
  for (DeltaTerm& d : raw.deltas) {
    d.coeff *= c;
  }
  return normalize(std::move(raw));
}

Distribution dual_mul_smooth(const SmoothExpr& g, const Distribution& f) {
  RawDistribution raw{f.breakpoints(), {}, {}};
  for (const SmoothExpr& p : f.pieces()) {
    raw.pieces.push_back(g * p);
  }
  for (const DeltaTerm& d : f.deltas()) {
    const std::vector<double> c = expand_delta(g, d.location, d.order);
    for (int k = 0; k <= d.order; ++k) {
      raw.deltas.push_back(DeltaTerm{d.location, k, d.coeff * c[static_cast<std::size_t>(k)]});
    }
  }
  return normalize(std::move(raw));
}

Distribution star(const Distribution& f, const Distribution& g) {
  RawDistribution raw;
  raw.breakpoints = merged_breakpoints(f, g);
  for (std::size_t i = 0; i <= raw.breakpoints.size(); ++i) {
    const bool first = (i == 0);
    const double left_end = first ? 0.0 : raw.breakpoints[i - 1];
    raw.pieces.push_back(f.pieces()[interval_index(f.breakpoints(), left_end, first)] *
                         g.pieces()[interval_index(g.breakpoints(), left_end, first)]);
  }
  for (const DeltaTerm& d : f.deltas()) {
    const std::vector<double> c = expand_delta(g.piece_right_of(d.location), d.location, d.order);
    for (int k = 0; k <= d.order; ++k) {
      raw.deltas.push_back(DeltaTerm{d.location, k, d.coeff * c[static_cast<std::size_t>(k)]});
    }
  }
  for (const DeltaTerm& d : g.deltas()) {
    const std::vector<double> c = expand_delta(f.piece_left_of(d.location), d.location, d.order);
    for (int k = 0; k <= d.order; ++k) {
      raw.deltas.push_back(DeltaTerm{d.location, k, d.coeff * c[static_cast<std::size_t>(k)]});
    }
  }
  return normalize(std::move(raw));
}

Distribution derivative(const Distribution& f, int n, const AlgebraOptions& opts) {
  if (n < 0) {
    throw InvalidInput("derivative order must be non-negative");
  }
  Distribution current = f;
  for (int step = 0; step < n; ++step) {
    RawDistribution raw{current.breakpoints(), {}, {}};
    for (const SmoothExpr& p : current.pieces()) {
      raw.pieces.push_back(p.derivative());
    }
    for (const DeltaTerm& d : current.deltas()) {
      raw.deltas.push_back(DeltaTerm{d.location, d.order + 1, d.coeff});
    }
    for (std::size_t i = 0; i < current.breakpoints().size(); ++i) {
      const double bp = current.breakpoints()[i];
      const double jump = current.pieces()[i + 1](bp) - current.pieces()[i](bp);
      raw.deltas.push_back(DeltaTerm{bp, 0, jump});
    }
    current = normalize(std::move(raw), opts);
  }
  return current;
}

int order(const Distribution& f) {
  int highest = -1;
  for (const DeltaTerm& d : f.deltas()) {
    highest = std::max(highest, d.order);
  }
  return highest + 1;
}

std::vector<double> sing_supp(const Distribution& f) { return f.breakpoints(); }

std::pair<double, double> eval_limits(const Distribution& f, double x) {
  return {f.piece_left_of(x)(x), f.piece_right_of(x)(x)};
}

double max_coefficient(const Distribution& f) {
  double m = 0.0;
  for (const DeltaTerm& d : f.deltas()) {
    m = std::max(m, std::abs(d.coeff));
  }
  for (const SmoothExpr& p : f.pieces()) {
    m = std::max(m, p.max_coefficient());
  }
  return m;
}

double coefficient_distance(const Distribution& f, const Distribution& g) {
  return max_coefficient(f - g);
}

std::string to_string(const Distribution& f) {
  std::ostringstream os;
  os.precision(12);
  os << "{breakpoints [";
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    os << (i ? ", " : "") << f.breakpoints()[i];
  }
  os << "], pieces [";
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    os << (i ? "; " : "") << to_string(f.pieces()[i]);
  }
  os << "], deltas [";
  for (std::size_t i = 0; i < f.deltas().size(); ++i) {
    const DeltaTerm& d = f.deltas()[i];
    os << (i ? ", " : "") << d.coeff << "*d" << d.order << "@" << d.location;
  }
  os << "]}";
  return os.str();
}

}  // namespace distbeam
