#pragma once

// Exact decision of the real-rootedness hypothesis on the transformed
// coefficients alpha'_m, recovery of the witness b with sigma_m(b) = alpha'_m,
// and the randomized quotient-concavity scan built on top of it.

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "symcurv/combop.hpp"
#include "symcurv/concave.hpp"
#include "symcurv/polynomial.hpp"
#include "symcurv/rational.hpp"

namespace symcurv {

using RationalPoly = Polynomial<Rational>;

enum class RootMode { Exact, Numeric };

struct RealRootResult {
  bool all_real = false;
  /// Real roots with multiplicity, ascending (when all_real).
  std::vector<double> roots;
  /// Every root is rational and stored exactly in exact_roots (exact mode only).
  bool roots_exact = false;
  std::vector<Rational> exact_roots;
  /// A non-real root (upper half plane) when !all_real.
  std::optional<std::complex<double>> witness;
};

/// alpha'_m = (n-k)! alpha_{k-m} / (n-k+m)!, m = 0..k.
std::vector<Rational> alpha_prime(const OperatorSpec& op);

/// Inverse transform: alphas (normalized, alpha_k = 1) whose alpha' are the
/// elementary symmetric values of b. Throws DomainError if sigma_m(b) != 0
/// for some m > k or sigma_0 mismatch cannot be normalized.
std::vector<Rational> alphas_from_witness(int n, int k, const std::vector<Rational>& b);

/// Square-free factors f_1, f_2, ... with p = c * prod f_i^i (Yun).
std::vector<RationalPoly> square_free_decomposition(const RationalPoly& p);

/// Number of distinct real roots of p (Sturm).
int sturm_real_root_count(const RationalPoly& p);

/// Decides whether every root of p is real. Exact mode counts roots per
/// square-free factor; numeric mode snaps companion eigenvalues.
/// Degree 0 is vacuously all real. Throws DomainError for the zero polynomial.
RealRootResult real_rooted(const RationalPoly& p);
RealRootResult real_rooted_numeric(const PolyCoeffs& p);
RealRootResult real_rooted(const RationalPoly& p, RootMode mode);

struct ConditionCReport {
  std::vector<Rational> alphas_prime;
  bool all_real = false;
  std::vector<double> roots;
  /// Length max(k, degree), nonnegative, sorted descending.
  std::vector<double> witness_b;
  /// True when witness_b is exact (all roots rational) and was checked exactly.
  bool witness_exact = false;
  std::vector<Rational> exact_witness_b;
  std::optional<std::complex<double>> failure_witness;
};

/// b_i = -1/t_i for the roots of sum alpha'_m t^m, zero padded to max(k, degree).
/// Throws DomainError when the roots are not all real and
/// InternalConsistencyError when sigma_m(b) does not reproduce alpha'.
ConditionCReport witness_b(int k, const std::vector<Rational>& alphas_prime,
                           const RealRootResult& roots);

ConditionCReport check_condition_c(const OperatorSpec& op);

/// Concavity of (Q / Q^N_l)^{1/(k-l)} on Gamma_k for l = 1..k-1, with the
/// lower operators built from the witness. Throws DomainError when the
/// operator fails the real-rootedness check; use concavity_scan directly on
/// quotient fields to look for counterexamples in that case.
ConcavityReport check_condition_q(const OperatorSpec& op, const ScanOptions& options,
                                  std::uint64_t seed);

/// Randomized scan of the log-quotient inequality at diagonal W in Gamma_k
/// with S_l built from the witness; beta = 1/(k-l). Values are residual/scale.
/// The delta-weighted form is evaluated too and its worst value returned in
/// the second report (not part of the pass decision of the first).
std::pair<VerificationReport, VerificationReport> guan_scan(const OperatorSpec& op, int l,
                                                            long trials, std::uint64_t seed,
                                                            double delta = 1.0, double tol = 1e-9);

}  // namespace symcurv
