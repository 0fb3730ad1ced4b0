#pragma once

// Linear combinations Q = sum_s alpha_s sigma_s and the objects derived from
// them: derivatives, sum-type quotients, univariate profiles t -> Q(a t + x)
// and the lower-order companions Q^{N'}_l built from a witness vector b.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcurv/cones.hpp"
#include "symcurv/polynomial.hpp"
#include "symcurv/rational.hpp"

namespace symcurv {

using PolyCoeffs = Polynomial<double>;

/// sum_{s=0}^{degree} coeffs[s] * sigma_s on R^n. No sign or normalization
/// constraints; OperatorSpec and LowerOperatorSpec add those.
struct SigmaCombination {
  int n = 0;
  std::vector<double> coeffs;

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

  double eval(std::span<const double> x) const;
  /// Same value from precomputed sigma_0..sigma_degree.
  double eval_from_sigmas(std::span<const double> sigmas) const;
  std::vector<double> grad(std::span<const double> x) const;
  Eigen::MatrixXd hess(std::span<const double> x) const;
};

/// Q = sum_{s=0}^k alpha_s sigma_s on R^n with alpha_s >= 0, alpha_k > 0,
/// normalized at construction so that alpha_k = 1. Coefficients are held
/// exactly (Rational) and as doubles.
class OperatorSpec {
 public:
  /// Throws DomainError unless 1 <= k <= n, alphas.size() == k + 1,
  /// all alphas >= 0 and alpha_k > 0.
  static OperatorSpec make(int n, int k, std::vector<Rational> alphas);
  static OperatorSpec from_doubles(int n, int k, const std::vector<double>& alphas);
  /// sigma_k + alpha sigma_{k-1}.
  static OperatorSpec sum_type(int n, int k, const Rational& alpha);
  /// sigma_k alone.
  static OperatorSpec pure(int n, int k);

  int n() const noexcept { return combo_.n; }
  int k() const noexcept { return combo_.degree(); }
  std::span<const double> alphas() const noexcept { return combo_.coeffs; }
  const std::vector<Rational>& exact_alphas() const noexcept { return exact_; }
  const SigmaCombination& combination() const noexcept { return combo_; }

  /// True when only alpha_k and alpha_{k-1} may be nonzero.
  bool is_sum_type() const;
  /// alpha_{k-1} (0 when k == 0 would be meaningless; k >= 1 always).
  double sum_alpha() const { return combo_.coeffs[static_cast<std::size_t>(k() - 1)]; }

  /// Gamma~_k(alpha_{k-1}) for sum-type operators, Gamma_k otherwise.
  ConeSpec admissible_cone(double tol = kDefaultConeTol) const;

  std::string describe() const;

 private:
  OperatorSpec(SigmaCombination combo, std::vector<Rational> exact)
      : combo_(std::move(combo)), exact_(std::move(exact)) {}

  SigmaCombination combo_;
  std::vector<Rational> exact_;
};

/// S_l = Q^{N'}_l: sigma_l plus nonnegative multiples of lower sigma_s.
struct LowerOperatorSpec {
  int l = 0;
  int n_prime = 0;
  SigmaCombination combination;  ///< coeffs[l] == 1 after normalization.

  double eval(std::span<const double> x) const { return combination.eval(x); }
  /// beta^l_s, s = 0..l-1.
  std::vector<double> betas() const {
    return {combination.coeffs.begin(), combination.coeffs.end() - 1};
  }
};

double q_eval(const OperatorSpec& op, std::span<const double> x);
std::vector<double> q_grad(const OperatorSpec& op, std::span<const double> x);
Eigen::MatrixXd q_hess(const OperatorSpec& op, std::span<const double> x);

/// Q_S^m = sigma_m + alpha sigma_{m-1}; Q_S^0 = 1.
double sum_type_value(int m, double alpha, std::span<const double> x);

/// q_k = Q_S^{k+1} / Q_S^k. Throws SingularityError on a zero denominator.
double quotient_q(int k, double alpha, std::span<const double> x);

/// Coefficients of t -> Q(a t + x), degree <= k.
struct ShiftedProfile {
  PolyCoeffs poly;
  int nominal_degree = 0;
  /// sigma_k(a) == 0 lowers the degree; reported here rather than thrown.
  bool degree_dropped() const noexcept { return poly.degree() < nominal_degree; }
};

ShiftedProfile shifted_profile(const OperatorSpec& op, std::span<const double> x,
                               std::span<const double> a);

/// Snapping threshold for declaring a companion eigenvalue real:
/// |imag| <= 1e-8 * (1 + max|c_i / c_d|).
double root_snap_tolerance(const PolyCoeffs& p);

/// All complex roots via companion-matrix eigenvalues; near-real roots are
/// snapped onto the real axis; sorted by real part then imaginary part.
/// Throws DomainError for the zero polynomial; a nonzero constant has no roots.
std::vector<std::complex<double>> profile_roots(const PolyCoeffs& p);

/// Q^{N'}_l from a Condition-(C) witness b: the product of the first N'
/// operators (1 + b_m d/dt) applied to sigma_l(t theta + x), written back as
/// sum_j sigma_j(b_1..b_N') (n-l+j)!/(n-l)! sigma_{l-j}.
/// Throws DomainError if b is not a witness for op (sigma_m(b) must match
/// alpha'_m to 1e-9 relative), if b has negative entries, or if ranges are off.
LowerOperatorSpec lower_operator(const OperatorSpec& op, std::span<const double> b, int l,
                                 int n_prime);

}  // namespace symcurv
