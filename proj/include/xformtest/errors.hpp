#pragma once

#include <stdexcept>
#include <string>

namespace xformtest {

// Argument outside the mathematical domain of a function (negative variance,
// probability outside (0,1), non-positive bandwidth, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Not enough data to compute a quantity: empty samples, too few grid
// points in an OLS window, zero variance where a ratio is required.
class InsufficientDataError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// The evaluation point sits where a reference CDF is 0 or 1, so the
// asymptotic variance of the transform estimator vanishes.
class DegeneratePointError : public std::runtime_error {
  public:
    explicit DegeneratePointError(double y, const std::string& detail)
        : std::runtime_error("degenerate evaluation point y=" + std::to_string(y) + ": " + detail),
          y_(y) {}

    double y() const noexcept { return y_; }

  private:
    double y_;
};

// Monte Carlo replication could not find a non-degenerate evaluation point.
class ExhaustedRetriesError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Two reference/training ranges do not overlap, so no common grid exists.
class NoOverlapError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input data (CSV cells, quantile tables, flags).
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace xformtest
