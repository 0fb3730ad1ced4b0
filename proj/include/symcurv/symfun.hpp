#pragma once

// Elementary symmetric polynomials sigma_m and their calculus.
//
// Everything that matters for exact decisions is templated on the scalar so
// the same code runs on double and on Rational. Conventions used throughout:
// sigma_0 = 1, and sigma_m = 0 for m < 0 or m > n inside recurrences.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcurv/errors.hpp"

namespace symcurv {

template <class T>
T binomial(int n, int m) {
  if (m < 0 || m > n) return T(0);
  T result(1);
  for (int i = 1; i <= m; ++i) {
    result *= T(n - m + i);
    result /= T(i);
  }
  return result;
}

template <class T>
T factorial(int n) {
  T result(1);
  for (int i = 2; i <= n; ++i) result *= T(i);
  return result;
}

/// sigma_0..sigma_{max_m} of x, via the coefficients of prod_i (1 + t x_i).
/// Entries past n come out zero.
template <class T>
std::vector<T> elem_sym_all(std::span<const T> x, int max_m) {
  std::vector<T> e(static_cast<std::size_t>(std::max(max_m, 0)) + 1, T(0));
  e[0] = T(1);
  int filled = 0;
  for (const T& xi : x) {
    filled = std::min(filled + 1, max_m);
    for (int m = filled; m >= 1; --m) e[m] += xi * e[m - 1];
  }
  return e;
}

/// Lenient sigma_m: 0 outside [0, n].
template <class T>
T sigma_ext(std::span<const T> x, int m) {
  if (m < 0 || m > static_cast<int>(x.size())) return T(0);
  return elem_sym_all(x, m)[static_cast<std::size_t>(m)];
}

/// sigma_m(x) for 0 <= m <= n.
template <class T>
T elem_sym(std::span<const T> x, int m) {
  if (m < 0 || m > static_cast<int>(x.size())) {
    throw DomainError("elem_sym: degree " + std::to_string(m) + " outside [0, " +
                      std::to_string(x.size()) + "]");
  }
  return elem_sym_all(x, m)[static_cast<std::size_t>(m)];
}

template <class T>
std::vector<T> without_indices(std::span<const T> x, std::span<const int> omit) {
  std::vector<bool> drop(x.size(), false);
  for (int i : omit) {
    if (i < 0 || i >= static_cast<int>(x.size())) {
      throw DomainError("elem_sym_deleted: index " + std::to_string(i) + " out of range");
    }
    if (drop[static_cast<std::size_t>(i)]) {
      throw DomainError("elem_sym_deleted: index " + std::to_string(i) + " repeated");
    }
    drop[static_cast<std::size_t>(i)] = true;
  }
  std::vector<T> kept;
  kept.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!drop[i]) kept.push_back(x[i]);
  }
  return kept;
}

/// sigma_m(x | omit): sigma_m of x with the listed (0-based) entries removed.
template <class T>
T elem_sym_deleted(std::span<const T> x, int m, std::span<const int> omit) {
  const auto kept = without_indices(x, omit);
  return elem_sym(std::span<const T>(kept), m);
}

/// d sigma_k / d x_i = sigma_{k-1}(x | i).
template <class T>
std::vector<T> sigma_grad(std::span<const T> x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 1 || k > n) throw DomainError("sigma_grad: need 1 <= k <= n");
  std::vector<T> grad(x.size());
  std::vector<T> reduced(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) reduced[w++] = x[j];
    }
    grad[i] = sigma_ext(std::span<const T>(reduced), k - 1);
  }
  return grad;
}

/// Hessian of sigma_k: off-diagonal sigma_{k-2}(x | pq), zero diagonal.
Eigen::MatrixXd sigma_hess(std::span<const double> x, int k);

/// Coefficient table c[a][b] of s^a u^b in prod_i (1 + s x_i + u y_i),
/// for a <= max_a, b <= max_b. c[a][b] is the sum over disjoint index sets
/// I, J with |I| = a, |J| = b of x_I y_J.
template <class T>
std::vector<std::vector<T>> polarization_table(std::span<const T> x, std::span<const T> y,
                                               int max_a, int max_b) {
  if (x.size() != y.size()) throw DomainError("polarization: dimension mismatch");
  std::vector<std::vector<T>> c(static_cast<std::size_t>(max_a) + 1,
                                std::vector<T>(static_cast<std::size_t>(max_b) + 1, T(0)));
  c[0][0] = T(1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int a = max_a; a >= 0; --a) {
      for (int b = max_b; b >= 0; --b) {
        if (a + b == 0) continue;
        T add(0);
        if (a > 0) add += x[i] * c[a - 1][b];
        if (b > 0) add += y[i] * c[a][b - 1];
        c[a][b] += add;
      }
    }
  }
  return c;
}

/// sigma_{l,k-l}(x, y): sum over disjoint |I| = l, |J| = k - l of x_I y_J.
/// With this normalization sigma_k(t x + (1-t) y) = sum_l t^l (1-t)^{k-l} sigma_{l,k-l}(x, y).
template <class T>
T polarized_sigma(std::span<const T> x, std::span<const T> y, int l, int k) {
  if (x.size() != y.size()) throw DomainError("polarized_sigma: dimension mismatch");
  if (l < 0 || l > k || k > static_cast<int>(x.size())) {
    throw DomainError("polarized_sigma: need 0 <= l <= k <= n");
  }
  return polarization_table(x, y, l, k - l)[static_cast<std::size_t>(l)]
                           [static_cast<std::size_t>(k - l)];
}

/// p_{k-1}^2 - p_k p_{k-2} with p_m = sigma_m / C(n, m). Nonnegative for real x.
template <class T>
T newton_maclaurin_gap(std::span<const T> x, int k) {
  const int n = static_cast<int>(x.size());
  if (k < 2 || k > n) throw DomainError("newton_maclaurin_gap: need 2 <= k <= n");
  const auto e = elem_sym_all(x, k);
  const T pk = e[k] / binomial<T>(n, k);
  const T pk1 = e[k - 1] / binomial<T>(n, k - 1);
  const T pk2 = e[k - 2] / binomial<T>(n, k - 2);
  return pk1 * pk1 - pk * pk2;
}

/// Second directional derivative of F(A) = sigma_k(eigenvalues(A)) at a
/// diagonal A with distinct entries, in the symmetric direction B:
///   sum_{j,l} f^{jl} B_jj B_ll + 2 sum_{j<l} (f^j - f^l)/(a_j - a_l) B_jl^2.
/// Throws DegenerateInputError if two diagonal entries are closer than
/// 1e-8 * max|a|.
double matrix_symfun_second_derivative(int k, std::span<const double> a_diag,
                                       const Eigen::MatrixXd& b);

}  // namespace symcurv
