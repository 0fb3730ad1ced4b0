#pragma once

// Numerical concavity checks: finite-difference Hessians, midpoint scans over
// sampled cone points, the closed form for 2q_1(x) - q_1(x+xi) - q_1(x-xi),
// and the diagonal form of the quotient inequalities for Q and S_l.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symcurv/combop.hpp"
#include "symcurv/cones.hpp"

namespace symcurv {

/// A real function on (part of) R^n. Evaluating outside the domain cone throws
/// ConeExitError carrying the offending point.
struct ScalarField {
  std::string name;
  int n = 0;
  std::optional<ConeSpec> domain;  ///< nullopt means all of R^n.
  std::function<double(std::span<const double>)> fn;

  double operator()(std::span<const double> x) const;
  bool in_domain(std::span<const double> x) const { return !domain || domain->contains(x); }
};

ScalarField custom_field(std::string name, int n, std::optional<ConeSpec> domain,
                         std::function<double(std::span<const double>)> fn);

/// sigma_k on Gamma_k.
ScalarField sigma_field(int n, int k);
/// sigma_k^{1/k} on Gamma_k.
ScalarField sigma_root_field(int n, int k);
/// q_k = Q_S^{k+1} / Q_S^k on Gamma_{domain_k} (domain_k = k or k + 1).
ScalarField quotient_qk_field(int n, int k, double alpha, int domain_k);
/// sigma_k / Q_S^k on Gamma~_k(alpha).
ScalarField sigma_over_q_field(int n, int k, double alpha);
/// (Q_S^k / Q_S^l)^{1/(k-l)} on Gamma~_k(alpha); l = 0 gives (Q_S^k)^{1/k}.
ScalarField sum_quotient_root_field(int n, int k, int l, double alpha);
/// Q^{1/k} on the given domain.
ScalarField root_q_field(const OperatorSpec& op, const ConeSpec& domain);
/// (Q / S)^{1/(k - S.l)} on Gamma_k.
ScalarField lower_quotient_field(const OperatorSpec& op, const LowerOperatorSpec& s);

/// Symmetrized central-difference Hessian with step h in every coordinate.
/// Probes outside the domain throw ConeExitError.
Eigen::MatrixXd fd_hessian(const ScalarField& field, std::span<const double> x, double h);

/// Largest coordinate step (at most 1 + |x|_inf, halving) that keeps x +- s e_i
/// inside the domain for every i.
double domain_reach(const ScalarField& field, std::span<const double> x);

struct AdaptiveHessian {
  Eigen::MatrixXd hessian;
  double step = 0.0;
  double error_estimate = 0.0;
};

/// Richardson-extrapolated central differences over the step ladder
/// h_j = h_top 2^-j, h_top = min(eps^{1/6} (1 + |x|_inf), reach / 2); returns the
/// rung whose extrapolated value changes least on the next rung. Rungs whose
/// probes leave the domain are skipped; throws ConeExitError if none is usable.
AdaptiveHessian fd_hessian_adaptive(const ScalarField& field, std::span<const double> x);

struct ScanOptions {
  long midpoint_trials = 10000;
  long hessian_trials = 1000;
  double midpoint_tol = 1e-9;
  double hessian_tol = 1e-6;
  int directions = 4;
};

struct ConcavityReport {
  VerificationReport midpoint;
  VerificationReport hessian;
  bool passed() const { return midpoint.passed && hessian.passed; }
};

ConcavityReport merge_concavity(std::string property, const std::vector<ConcavityReport>& parts);

/// Midpoint values (2f(x) - f(x+e xi) - f(x-e xi)) / (1 + |f(x)|) and
/// normalized largest Hessian eigenvalues over domain samples.
/// Requires a domain to sample from.
ConcavityReport concavity_scan(const ScalarField& field, const ScanOptions& options,
                               std::uint64_t seed);

/// (2q_1(x) - q_1(x+xi) - q_1(x-xi), closed-form right-hand side).
/// Throws SingularityError when alpha + sigma_1 vanishes at any of the points.
std::pair<double, double> q1_closed_form_check(std::span<const double> lambda,
                                               std::span<const double> xi, double alpha);

struct GuanCheckInput {
  EigenvalueVector W;
  std::vector<double> w;
  OperatorSpec op;
  LowerOperatorSpec s;
  double delta = 1.0;
  double beta = 1.0;  ///< 1 / (k - l)
};

struct GuanResiduals {
  double first = 0.0;   ///< LHS - RHS of the log-quotient form
  double second = 0.0;  ///< LHS - RHS of the delta-weighted form
  double first_scale = 0.0;
  double second_scale = 0.0;
};

/// Both inequalities at diagonal W along w, with derivative contractions
/// Q' = sum Q^{pp} w_p and Q'' = sum Q^{pp,qq} w_p w_q.
/// Throws SingularityError when Q(W) or S(W) vanishes.
GuanResiduals guan_inequality_check(const GuanCheckInput& input);

}  // namespace symcurv
