#include "distbeam/algebra_check.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace distbeam::check {

namespace {

void record(CheckResult& r, double err) {
  ++r.cases;
  r.max_error = std::max(r.max_error, err);
  if (!(err <= r.tolerance)) {
    ++r.failures;
  }
}

// Relative coefficient distance; coefficients of products of random
// elements reach O(100).
double rel_distance(const Distribution& f, const Distribution& g) {
  const double s = std::max({1.0, max_coefficient(f), max_coefficient(g)});
  return coefficient_distance(f, g) / s;
}

}  // namespace

bool SuiteReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

int SuiteReport::total_cases() const {
  int n = 0;
  for (const auto& c : checks) n += c.cases;
  return n;
}

int SuiteReport::total_failures() const {
  int n = 0;
  for (const auto& c : checks) n += c.failures;
  return n;
}

Distribution random_distribution(std::mt19937_64& rng) {
  static constexpr std::array<double, 5> kPoints{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> n_breaks(0, 3);
  std::uniform_int_distribution<int> degree(0, 4);
  std::uniform_int_distribution<int> delta_order(0, 2);
  std::bernoulli_distribution coin(0.5);

  std::vector<double> pts(kPoints.begin(), kPoints.end());
  std::shuffle(pts.begin(), pts.end(), rng);
  RawDistribution raw;
  raw.breakpoints.assign(pts.begin(), pts.begin() + n_breaks(rng));
  std::sort(raw.breakpoints.begin(), raw.breakpoints.end());
  for (std::size_t i = 0; i <= raw.breakpoints.size(); ++i) {
    std::vector<double> c(static_cast<std::size_t>(degree(rng)) + 1);
    for (double& v : c) v = coeff(rng);
    raw.pieces.push_back(SmoothExpr::polynomial(std::move(c)));
  }
  for (double bp : raw.breakpoints) {
    if (coin(rng)) {
      raw.deltas.push_back(DeltaTerm{bp, delta_order(rng), coeff(rng)});
    }
  }
  return normalize(std::move(raw));
}

SuiteReport run_identity_checks(double tol) {
  CheckResult left{"H(x0-x)*d(i) = d(i)", 0, 0, 0.0, tol};
  CheckResult right{"H(x-x0)*d(i) = 0", 0, 0, 0.0, tol};
  CheckResult dd{"d(i)*d(j) = 0", 0, 0, 0.0, tol};
  CheckResult mixed{"H*(H+d) = H, (H+d)*H = H+d", 0, 0, 0.0, tol};
  for (double x0 : {-1.0, 0.0, 0.25, 2.0}) {
    const Distribution hl = Distribution::heaviside_left(x0);
    const Distribution hr = Distribution::heaviside(x0);
    for (int i = 0; i <= 3; ++i) {
      const Distribution d = Distribution::delta(x0, i);
      record(left, coefficient_distance(star(hl, d), d));
      record(right, max_coefficient(star(hr, d)));
      for (int j = 0; j <= 3; ++j) {
        record(dd, max_coefficient(star(d, Distribution::delta(x0, j))));
      }
      const Distribution hd = hr + d;
      record(mixed, coefficient_distance(star(hr, hd), hr));
      record(mixed, coefficient_distance(star(hd, hr), hd));
    }
  }
  return SuiteReport{{left, right, dd, mixed}};
}

SuiteReport run_property_checks(int triples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  CheckResult leibniz{"Leibniz D(f*g) = Df*g + f*Dg", 0, 0, 0.0, tol};
  CheckResult assoc{"(f*g)*h = f*(g*h)", 0, 0, 0.0, tol};
  CheckResult distrib{"f*(g+h) = f*g + f*h, (f+g)*h = f*h + g*h", 0, 0, 0.0, tol};
  CheckResult smooth{"smooth multiplier commutes", 0, 0, 0.0, tol};
  for (int t = 0; t < triples; ++t) {
    const Distribution f = random_distribution(rng);
    const Distribution g = random_distribution(rng);
    const Distribution h = random_distribution(rng);
    record(leibniz, rel_distance(derivative(star(f, g)), star(derivative(f), g) + star(f, derivative(g))));
    record(assoc, rel_distance(star(star(f, g), h), star(f, star(g, h))));
    record(distrib, rel_distance(star(f, g + h), star(f, g) + star(f, h)));
    record(distrib, rel_distance(star(f + g, h), star(f, h) + star(g, h)));
    const SmoothExpr p = h.pieces().front();
    const Distribution ps{p};
    record(smooth, rel_distance(star(ps, f), star(f, ps)));
    record(smooth, rel_distance(star(ps, f), dual_mul_smooth(p, f)));
  }
  return SuiteReport{{leibniz, assoc, distrib, smooth}};
}

std::string format_report(const SuiteReport& r) {
  std::ostringstream os;
  for (const CheckResult& c : r.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-45s cases=%d failures=%d max_error=%.3g tol=%.0e\n",
                  c.passed() ? "ok" : "FAIL", c.name.c_str(), c.cases, c.failures, c.max_error, c.tolerance);
    os << line;
  }
  return os.str();
}

}  // namespace distbeam::check
