#pragma once

// Dense univariate polynomials, constant term first. Enough arithmetic for
// Euclid-style algorithms over an exact field (Rational) plus evaluation.

#include <cstddef>
#include <utility>
#include <vector>

#include "symcurv/errors.hpp"

namespace symcurv {

template <class T>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(T value) { return Polynomial(std::vector<T>{std::move(value)}); }

  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }

  const std::vector<T>& coeffs() const noexcept { return c_; }
  /// Coefficient of t^i (zero past the degree).
  T coeff(int i) const { return (i >= 0 && i <= degree()) ? c_[static_cast<std::size_t>(i)] : T(0); }
  const T& leading() const { return c_.back(); }

  T operator()(const T& t) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<long>(i));
    return Polynomial(std::move(d));
  }

  Polynomial operator-() const {
    std::vector<T> r(c_);
    for (auto& v : r) v = -v;
    return Polynomial(std::move(r));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Polynomial(std::move(r));
  }

  Polynomial scaled(const T& s) const {
    std::vector<T> r(c_);
    for (auto& v : r) v *= s;
    return Polynomial(std::move(r));
  }

  /// Quotient and remainder; exact over a field.
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    if (a.degree() < b.degree()) return {Polynomial(), a};
    std::vector<T> rem(a.c_);
    std::vector<T> quot(static_cast<std::size_t>(a.degree() - b.degree() + 1), T(0));
    const T& lead = b.leading();
    for (int i = a.degree() - b.degree(); i >= 0; --i) {
      const T factor = rem[static_cast<std::size_t>(i + b.degree())] / lead;
      quot[static_cast<std::size_t>(i)] = factor;
      if (factor == T(0)) continue;
      for (int j = 0; j <= b.degree(); ++j) {
        rem[static_cast<std::size_t>(i + j)] -= factor * b.c_[static_cast<std::size_t>(j)];
      }
      rem[static_cast<std::size_t>(i + b.degree())] = T(0);
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
  }

  Polynomial monic() const {
    if (is_zero()) return {};
    return scaled(T(1) / leading());
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
  }

  std::vector<T> c_;
};

/// Monic gcd (zero if both are zero).
template <class T>
Polynomial<T> gcd(Polynomial<T> a, Polynomial<T> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

}  // namespace symcurv
