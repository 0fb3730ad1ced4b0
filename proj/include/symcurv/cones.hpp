#pragma once

// Garding cones Gamma_k = {sigma_1..sigma_k > 0} and the admissible sets
// Gamma~_k(alpha) = Gamma_{k-1} n {alpha sigma_{k-1} + sigma_k > 0}:
// membership, sampling, and the randomized convexity/ellipticity checks.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symcurv/eigenvalue_vector.hpp"

namespace symcurv {

class OperatorSpec;
class CounterRng;

inline constexpr double kDefaultConeTol = 1e-12;

enum class ConeKind { GardingGamma, TildeGamma };

struct ConeSpec {
  ConeKind kind = ConeKind::GardingGamma;
  int n = 1;
  int k = 1;
  double alpha = 0.0;  ///< TildeGamma only.
  double tol = kDefaultConeTol;

  static ConeSpec gamma(int n, int k, double tol = kDefaultConeTol) {
    ConeSpec s{ConeKind::GardingGamma, n, k, 0.0, tol};
    s.validate();
    return s;
  }
  static ConeSpec tilde(int n, int k, double alpha, double tol = kDefaultConeTol) {
    ConeSpec s{ConeKind::TildeGamma, n, k, alpha, tol};
    s.validate();
    return s;
  }

  /// Throws DomainError unless 1 <= k <= n, alpha >= 0, tol >= 0.
  void validate() const;
  bool contains(std::span<const double> x) const;
  std::string describe() const;
};

/// Outcome of a randomized property scan. worst_value follows the signed
/// convention "negative means violated"; passed iff worst_value >= -tol.
struct VerificationReport {
  std::string property;
  bool passed = true;
  long trials = 0;
  double worst_value = 0.0;
  double tol = 0.0;
  std::optional<EigenvalueVector> witness;
  std::optional<EigenvalueVector> witness_aux;  ///< direction, second endpoint, ...
  std::uint64_t seed = 0;

  /// Records a value, keeping the minimum and its witness.
  void record(double value, const std::optional<EigenvalueVector>& point = std::nullopt,
              const std::optional<EigenvalueVector>& aux = std::nullopt);
  void finalize() { passed = worst_value >= -tol; }
};

/// Worst-case merge of two reports on the same tolerance convention.
VerificationReport merge_reports(std::string property, const std::vector<VerificationReport>& parts);

/// sigma_m(x) > tol * C(n, m) * max|x_i|^m for m = 1..k.
bool in_gamma_k(std::span<const double> x, int k, double tol = kDefaultConeTol);

/// x in Gamma_{k-1} and alpha sigma_{k-1} + sigma_k > tol * scale.
bool in_gamma_tilde(std::span<const double> x, int k, double alpha, double tol = kDefaultConeTol);

/// Smallest normalized defining quantity of the cone at x (positive inside).
double cone_margin(const ConeSpec& spec, std::span<const double> x);

/// One cone point drawn from rng (positive orthant with log-uniform
/// magnitudes in [1e-2, 1e2], mixed toward a vector with one negative entry,
/// rejected while outside). Throws SamplingError after max_attempts misses.
EigenvalueVector sample_cone_point(const ConeSpec& spec, CounterRng& rng, long max_attempts = 1000);

/// count points, deterministic in seed. Throws DomainError for count < 1 and
/// SamplingError when more than 99.9% of draws are rejected.
std::vector<EigenvalueVector> sample_cone(const ConeSpec& spec, long count, std::uint64_t seed);

/// Draws segments with endpoints in the cone and checks 9 interior blends.
VerificationReport segment_convexity_check(const ConeSpec& spec, long trials, std::uint64_t seed);

/// Worst normalized cone margin over the blends t = 0.1..0.9 of one segment.
double segment_margin(const ConeSpec& spec, std::span<const double> a, std::span<const double> b,
                      std::span<const double> ts);

/// min_i dQ/dx_i at x; positive certifies strict ellipticity there.
double ellipticity_check(const OperatorSpec& op, std::span<const double> x);

/// Samples the operator's admissible cone and records min_i Q^{ii} / scale.
VerificationReport ellipticity_scan(const OperatorSpec& op, long trials, std::uint64_t seed,
                                    double tol = 1e-12);

}  // namespace symcurv
