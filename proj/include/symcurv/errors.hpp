#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace symcurv {

/// Precondition or argument-range violation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Repeated eigenvalues where a formula needs distinct ones.
class DegenerateInputError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A quotient's denominator vanished.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling could not fill the request.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A self-check inside the library failed (should never happen on valid input).
class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Evaluation point left the admissible cone. Carries the offending points
/// (finite-difference probes) or node indices (surface solver).
class ConeExitError : public DomainError {
 public:
  ConeExitError(const std::string& what, std::vector<double> point,
                std::vector<std::size_t> nodes = {})
      : DomainError(what), point_(std::move(point)), nodes_(std::move(nodes)) {}

  const std::vector<double>& point() const noexcept { return point_; }
  const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

 private:
  std::vector<double> point_;
  std::vector<std::size_t> nodes_;
};

/// Newton or continuation failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symcurv
