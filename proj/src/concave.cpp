#include "symcurv/concave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symcurv/rng.hpp"
#include "symcurv/symfun.hpp"

namespace symcurv {
namespace {

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

const ConeSpec& require_domain(const ScalarField& field) {
  if (!field.domain) throw DomainError("concavity_scan: field " + field.name + " has no domain");
  return *field.domain;
}

// Hessian probes use a counter range disjoint from the midpoint trials.
constexpr std::uint64_t kHessianStream = 1ULL << 40;
constexpr int kMaxResample = 100;

}  // namespace

double ScalarField::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) {
    throw DomainError(name + ": expected dimension " + std::to_string(n));
  }
  if (!in_domain(x)) {
    throw ConeExitError(name + ": evaluation point outside " + domain->describe(),
                        std::vector<double>(x.begin(), x.end()));
  }
  return fn(x);
}

ScalarField custom_field(std::string name, int n, std::optional<ConeSpec> domain,
                         std::function<double(std::span<const double>)> fn) {
  return {std::move(name), n, std::move(domain), std::move(fn)};
}

ScalarField sigma_field(int n, int k) {
  const auto cone = ConeSpec::gamma(n, k);
  cone.validate();
  return {"sigma_" + std::to_string(k), n, cone,
          [k](std::span<const double> x) { return sigma_ext(x, k); }};
}

ScalarField sigma_root_field(int n, int k) {
  const auto cone = ConeSpec::gamma(n, k);
  cone.validate();
  return {"sigma_" + std::to_string(k) + "^(1/" + std::to_string(k) + ")", n, cone,
          [k](std::span<const double> x) { return std::pow(sigma_ext(x, k), 1.0 / k); }};
}

ScalarField quotient_qk_field(int n, int k, double alpha, int domain_k) {
  if (k < 1 || k + 1 > n) throw DomainError("quotient_qk_field: need 1 <= k < n");
  if (domain_k != k && domain_k != k + 1) {
    throw DomainError("quotient_qk_field: domain degree must be k or k + 1");
  }
  return {"q_" + std::to_string(k) + "(alpha=" + std::to_string(alpha) + ")", n,
          ConeSpec::gamma(n, domain_k),
          [k, alpha](std::span<const double> x) { return quotient_q(k, alpha, x); }};
}

ScalarField sigma_over_q_field(int n, int k, double alpha) {
  const auto cone = ConeSpec::tilde(n, k, alpha);
  cone.validate();
  return {"sigma_" + std::to_string(k) + "/Q_S^" + std::to_string(k), n, cone,
          [k, alpha](std::span<const double> x) {
            return sigma_ext(x, k) / sum_type_value(k, alpha, x);
          }};
}

ScalarField sum_quotient_root_field(int n, int k, int l, double alpha) {
  if (l < 0 || l >= k) throw DomainError("sum_quotient_root_field: need 0 <= l < k");
  const auto cone = ConeSpec::tilde(n, k, alpha);
  cone.validate();
  const double power = 1.0 / (k - l);
  return {"(Q_S^" + std::to_string(k) + "/Q_S^" + std::to_string(l) + ")^(1/" +
              std::to_string(k - l) + ")",
          n, cone, [k, l, alpha, power](std::span<const double> x) {
            return std::pow(sum_type_value(k, alpha, x) / sum_type_value(l, alpha, x), power);
          }};
}

ScalarField root_q_field(const OperatorSpec& op, const ConeSpec& domain) {
  const SigmaCombination combo = op.combination();
  const double power = 1.0 / op.k();
  return {"(" + op.describe() + ")^(1/" + std::to_string(op.k()) + ")", op.n(), domain,
          [combo, power](std::span<const double> x) { return std::pow(combo.eval(x), power); }};
}

ScalarField lower_quotient_field(const OperatorSpec& op, const LowerOperatorSpec& s) {
  const SigmaCombination q = op.combination();
  const SigmaCombination lower = s.combination;
  const double power = 1.0 / (op.k() - s.l);
  return {"(Q/Q^" + std::to_string(s.n_prime) + "_" + std::to_string(s.l) + ")^(1/" +
              std::to_string(op.k() - s.l) + ") for " + op.describe(),
          op.n(), ConeSpec::gamma(op.n(), op.k()),
          [q, lower, power](std::span<const double> x) {
            return std::pow(q.eval(x) / lower.eval(x), power);
          }};
}

Eigen::MatrixXd fd_hessian(const ScalarField& field, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw DomainError("fd_hessian: step must be positive");
  const int n = static_cast<int>(x.size());
  std::vector<double> p(x.begin(), x.end());
  auto at = [&](int i, double si, int j, double sj) {
    p[static_cast<std::size_t>(i)] += si;
    if (j >= 0) p[static_cast<std::size_t>(j)] += sj;
    const double v = field(p);
    p[static_cast<std::size_t>(i)] -= si;
    if (j >= 0) p[static_cast<std::size_t>(j)] -= sj;
    return v;
  };
  const double f0 = field(x);
  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i) {
    hess(i, i) = (at(i, h, -1, 0.0) - 2.0 * f0 + at(i, -h, -1, 0.0)) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      const double v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) /
                       (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

double domain_reach(const ScalarField& field, std::span<const double> x) {
  double reach = 1.0 + max_abs(x);
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (double dir : {1.0, -1.0}) {
      double s = reach;
      for (int halvings = 0; halvings < 80; ++halvings) {
        p[i] = x[i] + dir * s;
        if (field.in_domain(p)) break;
        s *= 0.5;
      }
      p[i] = x[i];
      reach = std::min(reach, s);
    }
  }
  return reach;
}

AdaptiveHessian fd_hessian_adaptive(const ScalarField& field, std::span<const double> x) {
  constexpr int kRungs = 12;
  const double h_top = std::min(std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0) *
                                    (1.0 + max_abs(x)),
                                0.5 * domain_reach(field, x));
  std::vector<std::optional<Eigen::MatrixXd>> plain(kRungs + 1);
  for (int j = 0; j <= kRungs; ++j) {
    try {
      plain[static_cast<std::size_t>(j)] = fd_hessian(field, x, std::ldexp(h_top, -j));
    } catch (const ConeExitError&) {
    }
  }
  std::vector<std::optional<Eigen::MatrixXd>> rich(kRungs);
  for (int j = 0; j < kRungs; ++j) {
    const auto& coarse = plain[static_cast<std::size_t>(j)];
    const auto& fine = plain[static_cast<std::size_t>(j) + 1];
    if (coarse && fine) rich[static_cast<std::size_t>(j)] = (4.0 * *fine - *coarse) / 3.0;
  }
  std::optional<AdaptiveHessian> best;
  for (int j = 0; j + 1 < kRungs; ++j) {
    const auto& r0 = rich[static_cast<std::size_t>(j)];
    const auto& r1 = rich[static_cast<std::size_t>(j) + 1];
    if (!r0 || !r1) continue;
    const double err = (*r0 - *r1).cwiseAbs().maxCoeff();
    if (!best || err < best->error_estimate) best = AdaptiveHessian{*r1, std::ldexp(h_top, -j - 1), err};
  }
  if (!best) {
    throw ConeExitError(field.name + ": no usable finite-difference step",
                        std::vector<double>(x.begin(), x.end()));
  }
  return *best;
}

ConcavityReport merge_concavity(std::string property, const std::vector<ConcavityReport>& parts) {
  std::vector<VerificationReport> mids;
  std::vector<VerificationReport> hess;
  for (const auto& p : parts) {
    mids.push_back(p.midpoint);
    hess.push_back(p.hessian);
  }
  ConcavityReport out{merge_reports(property + " (midpoint)", mids),
                      merge_reports(property + " (hessian)", hess)};
  return out;
}

ConcavityReport concavity_scan(const ScalarField& field, const ScanOptions& options,
                               std::uint64_t seed) {
  const ConeSpec& cone = require_domain(field);
  ConcavityReport report;
  report.midpoint.property = field.name + " midpoint concavity on " + cone.describe();
  report.midpoint.tol = options.midpoint_tol;
  report.midpoint.seed = seed;
  report.hessian.property = field.name + " hessian concavity on " + cone.describe();
  report.hessian.tol = options.hessian_tol;
  report.hessian.seed = seed;

  const auto n = static_cast<std::size_t>(field.n);
  std::vector<double> xi(n);
  std::vector<double> plus(n);
  std::vector<double> minus(n);
  for (long trial = 0; trial < options.midpoint_trials; ++trial) {
    CounterRng rng(seed, static_cast<std::uint64_t>(trial));
    const auto x = sample_cone_point(cone, rng);
    const double f0 = field(x);
    const double scale = max_abs(x);
    for (int d = 0; d < options.directions; ++d) {
      for (auto& v : xi) v = rng.normal() * scale;
      double eps = 0.5;
      bool inside = false;
      for (int halvings = 0; halvings < 80 && !inside; ++halvings) {
        for (std::size_t i = 0; i < n; ++i) {
          plus[i] = x[i] + eps * xi[i];
          minus[i] = x[i] - eps * xi[i];
        }
        inside = field.in_domain(plus) && field.in_domain(minus);
        if (!inside) eps *= 0.5;
      }
      if (!inside) continue;
      const double value = (2.0 * f0 - field(plus) - field(minus)) / (1.0 + std::abs(f0));
      std::vector<double> step(n);
      for (std::size_t i = 0; i < n; ++i) step[i] = eps * xi[i];
      report.midpoint.record(value, x, EigenvalueVector(step));
    }
  }

  for (long trial = 0; trial < options.hessian_trials; ++trial) {
    CounterRng rng(seed, kHessianStream + static_cast<std::uint64_t>(trial));
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
      const auto x = sample_cone_point(cone, rng);
      Eigen::MatrixXd hess;
      std::vector<double> grad(n);
      double f0 = 0.0;
      try {
        const auto adaptive = fd_hessian_adaptive(field, x);
        hess = adaptive.hessian;
        const double h = adaptive.step;
        f0 = field(x);
        std::vector<double> p(x.begin(), x.end());
        for (std::size_t i = 0; i < n; ++i) {
          p[i] = x[i] + h;
          const double fp = field(p);
          p[i] = x[i] - h;
          const double fm = field(p);
          p[i] = x[i];
          grad[i] = (fp - fm) / (2.0 * h);
        }
      } catch (const ConeExitError&) {
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
      const Eigen::Index top = field.n - 1;
      const double lambda_max = eig.eigenvalues()[top];
      const double sx = std::max(max_abs(x), std::numeric_limits<double>::min());
      const double local = eig.eigenvalues().cwiseAbs().maxCoeff() +
                           (std::abs(f0) + sx * max_abs(grad)) / (sx * sx);
      const double value = local > 0.0 ? -lambda_max / local : 0.0;
      const Eigen::VectorXd v = eig.eigenvectors().col(top);
      report.hessian.record(value, x, EigenvalueVector(std::vector<double>(v.data(), v.data() + v.size())));
      break;
    }
  }
  report.midpoint.finalize();
  report.hessian.finalize();
  return report;
}

std::pair<double, double> q1_closed_form_check(std::span<const double> lambda,
                                               std::span<const double> xi, double alpha) {
  if (lambda.size() != xi.size() || lambda.empty()) {
    throw DomainError("q1_closed_form_check: dimension mismatch");
  }
  const std::size_t n = lambda.size();
  std::vector<double> plus(n);
  std::vector<double> minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    plus[i] = lambda[i] + xi[i];
    minus[i] = lambda[i] - xi[i];
  }
  const double lhs = 2.0 * quotient_q(1, alpha, lambda) - quotient_q(1, alpha, plus) -
                     quotient_q(1, alpha, minus);
  const double s_l = sigma_ext(lambda, 1);
  const double s_x = sigma_ext(xi, 1);
  double num = alpha * alpha * s_x * s_x;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (alpha + s_l) * xi[i] - s_x * lambda[i];
    num += t * t;
  }
  const double den = (alpha + s_l) * (alpha + s_l + s_x) * (alpha + s_l - s_x);
  if (den == 0.0) throw SingularityError("q1_closed_form_check: alpha + sigma_1 vanishes");
  return {lhs, num / den};
}

GuanResiduals guan_inequality_check(const GuanCheckInput& input) {
  const auto& W = input.W;
  const int n = input.op.n();
  if (static_cast<int>(W.size()) != n || static_cast<int>(input.w.size()) != n) {
    throw DomainError("guan_inequality_check: dimension mismatch");
  }
  if (!(input.delta > 0.0)) throw DomainError("guan_inequality_check: delta must be positive");
  const auto& qc = input.op.combination();
  const auto& sc = input.s.combination;
  const double q = qc.eval(W);
  const double s = sc.eval(W);
  if (q == 0.0) throw SingularityError("guan_inequality_check: Q(W) vanishes");
  if (s == 0.0) throw SingularityError("guan_inequality_check: S(W) vanishes");

  const Eigen::Map<const Eigen::VectorXd> w(input.w.data(), n);
  const auto qg = qc.grad(W);
  const auto sg = sc.grad(W);
  const double dq = Eigen::Map<const Eigen::VectorXd>(qg.data(), n).dot(w);
  const double ds = Eigen::Map<const Eigen::VectorXd>(sg.data(), n).dot(w);
  const double d2q = w.dot(qc.hess(W) * w);
  const double d2s = w.dot(sc.hess(W) * w);
  const double beta = input.beta;
  const double delta = input.delta;

  const double a = dq / q;
  const double b = ds / s;
  GuanResiduals r;
  const double lhs1 = -d2q / q + d2s / s;
  const double rhs1 = (a - b) * ((beta - 1.0) * a - (beta + 1.0) * b);
  r.first = lhs1 - rhs1;
  r.first_scale = std::abs(d2q / q) + std::abs(d2s / s) +
                  (std::abs(a) + std::abs(b)) * (std::abs(beta - 1.0) * std::abs(a) +
                                                 (beta + 1.0) * std::abs(b));

  const double c = 1.0 - beta + beta / delta;
  const double lhs2 = -d2q + c * dq * dq / q;
  const double rhs2 = q * (beta + 1.0 - delta * beta) * b * b - (q / s) * d2s;
  r.second = lhs2 - rhs2;
  r.second_scale = std::abs(d2q) + std::abs(c * dq * dq / q) +
                   std::abs(q * (beta + 1.0 - delta * beta) * b * b) + std::abs(q / s * d2s);
  return r;
}

}  // namespace symcurv
