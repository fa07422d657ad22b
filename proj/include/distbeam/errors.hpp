#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace distbeam {

// Bad argument values: non-increasing breakpoints, out-of-range beam
// parameters, inconsistent crack splits.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called on data that violates its documented precondition
// (e.g. interface matrices requested for a vanishing leading coefficient).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Repeated differentiation pushed a delta term past the configured order cap.
class OrderOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// The characteristic matrix is numerically nonsingular at the requested alpha.
class NotAFrequency : public std::runtime_error {
 public:
  NotAFrequency(const std::string& what, double relative_sigma)
      : std::runtime_error(what), relative_sigma_(relative_sigma) {}

  double relative_sigma() const noexcept { return relative_sigma_; }

 private:
  double relative_sigma_;
};

// Fewer roots than requested were found below alpha_max.
class FrequencyShortfall : public std::runtime_error {
 public:
  FrequencyShortfall(const std::string& what, std::vector<double> found)
      : std::runtime_error(what), found_(std::move(found)) {}

  const std::vector<double>& found() const noexcept { return found_; }

 private:
  std::vector<double> found_;
};

}  // namespace distbeam
