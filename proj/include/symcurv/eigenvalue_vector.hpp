#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "symcurv/errors.hpp"

namespace symcurv {

/// An ordered list of n >= 1 finite reals: principal curvatures or cone
/// points. Order is whatever the caller gave; nothing here sorts.
class EigenvalueVector {
 public:
  EigenvalueVector() = default;

  explicit EigenvalueVector(std::vector<double> values) : values_(std::move(values)) {
    validate();
  }

  EigenvalueVector(std::initializer_list<double> values) : values_(values) { validate(); }

  /// The all-ones vector of dimension n.
  static EigenvalueVector ones(std::size_t n) { return EigenvalueVector(std::vector<double>(n, 1.0)); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  operator std::span<const double>() const noexcept { return values_; }  // NOLINT
  const std::vector<double>& vector() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const EigenvalueVector&, const EigenvalueVector&) = default;

 private:
  void validate() const {
    if (values_.empty()) throw DomainError("EigenvalueVector: dimension must be at least 1");
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("EigenvalueVector: entries must be finite");
    }
  }

  std::vector<double> values_;
};

std::string to_string(const EigenvalueVector& v);

}  // namespace symcurv
