#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "distbeam/distribution.hpp"

namespace distbeam::check {

struct CheckResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  double max_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return failures == 0; }
};

struct SuiteReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  int total_cases() const;
  int total_failures() const;
};

/// Random element of the algebra: up to three breakpoints from a fixed set,
/// polynomial pieces of degree <= 4, delta terms of order <= 2 on the
/// breakpoints.
Distribution random_distribution(std::mt19937_64& rng);

/// Heaviside/delta product identities and the delta-by-delta rule.
SuiteReport run_identity_checks(double tol = 1e-12);

/// Leibniz rule, associativity, distributivity and agreement with the
/// smooth-multiplier product on `triples` random triples.
SuiteReport run_property_checks(int triples = 200, std::uint64_t seed = 20240611, double tol = 1e-9);

std::string format_report(const SuiteReport& r);

}  // namespace distbeam::check
