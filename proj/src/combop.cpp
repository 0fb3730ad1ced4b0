#include "symcurv/combop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "symcurv/symfun.hpp"

namespace symcurv {
namespace {

void require_dimension(int n, std::span<const double> x, const char* where) {
  if (static_cast<int>(x.size()) != n) {
    throw DomainError(std::string(where) + ": expected dimension " + std::to_string(n) + ", got " +
                      std::to_string(x.size()));
  }
}

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Parlett-Reinsch balancing with powers of two, applied in place.
void balance(MatrixXld& m) {
  const Eigen::Index n = m.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const long double col = m.col(i).lpNorm<1>() - std::abs(m(i, i));
      const long double row = m.row(i).lpNorm<1>() - std::abs(m(i, i));
      if (col == 0.0L || row == 0.0L) continue;
      long double f = 1.0L;
      long double c = col;
      const long double s = col + row;
      while (c < row / 2.0) {
        c *= 2.0;
        f *= 2.0;
      }
      while (c >= row * 2.0) {
        c /= 2.0;
        f /= 2.0;
      }
      if ((c + row / f) < 0.95 * s) {
        converged = false;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

// A root of multiplicity m splits into a cluster of radius about
// (eps * scale)^{1/m} while the cluster centroid stays accurate; a tight
// cluster with a real centroid is snapped as one multiple real root.
std::vector<std::complex<double>> snap_clusters(const std::vector<std::complex<long double>>& raw,
                                                const std::vector<double>& coeffs, double tol) {
  const std::size_t d = raw.size();
  long double scale = 1.0L;
  for (double c : coeffs) {
    scale = std::max(scale, std::abs(static_cast<long double>(c) / coeffs.back()));
  }
  const long double eps = std::numeric_limits<long double>::epsilon();
  std::vector<std::complex<double>> out(d);
  std::vector<bool> done(d, false);
  for (std::size_t i = 0; i < d; ++i) {
    if (done[i] || std::abs(raw[i].imag()) <= tol) continue;
    const auto zi = raw[i];
    // Widest plausible cluster radius, for multiplicity d.
    const long double reach = 10.0L * std::pow(eps * scale, 1.0L / static_cast<long double>(d)) *
                              (1.0L + std::abs(zi));
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < d; ++j) {
      if (!done[j] && std::abs(raw[j] - zi) <= reach) members.push_back(j);
    }
    std::complex<long double> centroid = 0.0L;
    for (auto j : members) centroid += raw[j];
    centroid /= static_cast<long double>(members.size());
    long double spread = 0.0L;
    for (auto j : members) spread = std::max(spread, std::abs(raw[j] - centroid));
    const long double allowed =
        10.0L * std::pow(eps * scale, 1.0L / static_cast<long double>(members.size())) *
        (1.0L + std::abs(centroid));
    if (members.size() >= 2 && spread <= allowed && std::abs(centroid.imag()) <= tol) {
      for (auto j : members) {
        out[j] = {static_cast<double>(centroid.real()), 0.0};
        done[j] = true;
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (done[i]) continue;
    const auto zi = raw[i];
    out[i] = {static_cast<double>(zi.real()),
              std::abs(zi.imag()) <= tol ? 0.0 : static_cast<double>(zi.imag())};
  }
  return out;
}

}  // namespace

double SigmaCombination::eval(std::span<const double> x) const {
  require_dimension(n, x, "SigmaCombination::eval");
  const auto sig = elem_sym_all(x, degree());
  return eval_from_sigmas(sig);
}

double SigmaCombination::eval_from_sigmas(std::span<const double> sigmas) const {
  double acc = 0.0;
  for (std::size_t s = 0; s < coeffs.size(); ++s) {
    if (coeffs[s] != 0.0) acc += coeffs[s] * sigmas[s];
  }
  return acc;
}

std::vector<double> SigmaCombination::grad(std::span<const double> x) const {
  require_dimension(n, x, "SigmaCombination::grad");
  std::vector<double> g(x.size(), 0.0);
  for (int s = 1; s <= degree(); ++s) {
    const double c = coeffs[static_cast<std::size_t>(s)];
    if (c == 0.0) continue;
    const auto gs = sigma_grad(x, s);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * gs[i];
  }
  return g;
}

Eigen::MatrixXd SigmaCombination::hess(std::span<const double> x) const {
  require_dimension(n, x, "SigmaCombination::hess");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int s = 2; s <= degree(); ++s) {
    const double c = coeffs[static_cast<std::size_t>(s)];
    if (c != 0.0) h += c * sigma_hess(x, s);
  }
  return h;
}

OperatorSpec OperatorSpec::make(int n, int k, std::vector<Rational> alphas) {
  if (k < 1 || k > n) throw DomainError("OperatorSpec: need 1 <= k <= n");
  if (alphas.size() != static_cast<std::size_t>(k) + 1) {
    throw DomainError("OperatorSpec: expected k + 1 = " + std::to_string(k + 1) + " coefficients");
  }
  for (const auto& a : alphas) {
    if (a < 0) throw DomainError("OperatorSpec: coefficients must be nonnegative");
  }
  const Rational lead = alphas.back();
  if (lead <= 0) throw DomainError("OperatorSpec: leading coefficient alpha_k must be positive");
  SigmaCombination combo{n, {}};
  combo.coeffs.reserve(alphas.size());
  for (auto& a : alphas) {
    a /= lead;
    combo.coeffs.push_back(to_double(a));
  }
  return OperatorSpec(std::move(combo), std::move(alphas));
}

OperatorSpec OperatorSpec::from_doubles(int n, int k, const std::vector<double>& alphas) {
  std::vector<Rational> exact;
  exact.reserve(alphas.size());
  for (double a : alphas) {
    if (!std::isfinite(a)) throw DomainError("OperatorSpec: coefficients must be finite");
    exact.push_back(to_rational(a));
  }
  return make(n, k, std::move(exact));
}

OperatorSpec OperatorSpec::sum_type(int n, int k, const Rational& alpha) {
  std::vector<Rational> a(static_cast<std::size_t>(std::max(k, 0)) + 1, Rational(0));
  if (k >= 1) {
    a[static_cast<std::size_t>(k)] = 1;
    a[static_cast<std::size_t>(k - 1)] = alpha;
  }
  return make(n, k, std::move(a));
}

OperatorSpec OperatorSpec::pure(int n, int k) { return sum_type(n, k, Rational(0)); }

bool OperatorSpec::is_sum_type() const {
  for (int s = 0; s + 1 < k(); ++s) {
    if (exact_[static_cast<std::size_t>(s)] != 0) return false;
  }
  return true;
}

ConeSpec OperatorSpec::admissible_cone(double tol) const {
  if (is_sum_type()) return ConeSpec::tilde(n(), k(), sum_alpha(), tol);
  return ConeSpec::gamma(n(), k(), tol);
}

std::string OperatorSpec::describe() const {
  std::ostringstream out;
  bool first = true;
  for (int s = k(); s >= 0; --s) {
    const auto& a = exact_[static_cast<std::size_t>(s)];
    if (a == 0) continue;
    if (!first) out << " + ";
    first = false;
    if (a != 1) out << a << "*";
    out << "sigma_" << s;
  }
  out << " (n=" << n() << ")";
  return out.str();
}

double q_eval(const OperatorSpec& op, std::span<const double> x) { return op.combination().eval(x); }

std::vector<double> q_grad(const OperatorSpec& op, std::span<const double> x) {
  return op.combination().grad(x);
}

Eigen::MatrixXd q_hess(const OperatorSpec& op, std::span<const double> x) {
  return op.combination().hess(x);
}

double sum_type_value(int m, double alpha, std::span<const double> x) {
  if (m < 0) throw DomainError("sum_type_value: m must be nonnegative");
  if (m == 0) return 1.0;
  const auto sig = elem_sym_all(x, m);
  return sig[static_cast<std::size_t>(m)] + alpha * sig[static_cast<std::size_t>(m - 1)];
}

double quotient_q(int k, double alpha, std::span<const double> x) {
  if (k < 0 || k + 1 > static_cast<int>(x.size())) {
    throw DomainError("quotient_q: need 0 <= k < n");
  }
  const double den = sum_type_value(k, alpha, x);
  if (den == 0.0 || !std::isfinite(den)) {
    throw SingularityError("quotient_q: Q_S^" + std::to_string(k) + " vanishes");
  }
  return sum_type_value(k + 1, alpha, x) / den;
}

ShiftedProfile shifted_profile(const OperatorSpec& op, std::span<const double> x,
                               std::span<const double> a) {
  require_dimension(op.n(), x, "shifted_profile");
  require_dimension(op.n(), a, "shifted_profile");
  const int k = op.k();
  // table[j][m] collects terms with j factors from a and m from x.
  const auto table = polarization_table(a, x, k, k);
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  for (int s = 0; s <= k; ++s) {
    const double alpha = op.alphas()[static_cast<std::size_t>(s)];
    if (alpha == 0.0) continue;
    for (int j = 0; j <= s; ++j) {
      c[static_cast<std::size_t>(j)] +=
          alpha * table[static_cast<std::size_t>(j)][static_cast<std::size_t>(s - j)];
    }
  }
  return {PolyCoeffs(std::move(c)), k};
}

double root_snap_tolerance(const PolyCoeffs& p) {
  if (p.is_zero()) throw DomainError("root_snap_tolerance: zero polynomial");
  double m = 0.0;
  for (double c : p.coeffs()) m = std::max(m, std::abs(c / p.leading()));
  return 1e-8 * (1.0 + m);
}

std::vector<std::complex<double>> profile_roots(const PolyCoeffs& p) {
  if (p.is_zero()) throw DomainError("profile_roots: zero polynomial");
  std::vector<std::complex<double>> roots;
  const auto& c = p.coeffs();
  std::size_t zeros = 0;
  while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
  roots.assign(zeros, {0.0, 0.0});

  const std::vector<double> rest(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end());
  const int d = static_cast<int>(rest.size()) - 1;
  if (d >= 1) {
    const double tol = root_snap_tolerance(PolyCoeffs(rest));
    // Extended precision keeps the splitting of double roots (about sqrt(eps))
    // well below the snapping threshold.
    MatrixXld comp = MatrixXld::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0L;
    for (int i = 0; i < d; ++i) {
      comp(i, d - 1) = -static_cast<long double>(rest[static_cast<std::size_t>(i)]) /
                       static_cast<long double>(rest.back());
    }
    balance(comp);
    Eigen::EigenSolver<MatrixXld> solver(comp, false);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError("profile_roots: companion eigenvalue iteration failed");
    }
    std::vector<std::complex<long double>> raw;
    for (Eigen::Index i = 0; i < d; ++i) raw.push_back(solver.eigenvalues()[i]);
    for (const auto& z : snap_clusters(raw, rest, tol)) roots.push_back(z);
  }
  std::sort(roots.begin(), roots.end(), [](const auto& u, const auto& v) {
    return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
  });
  return roots;
}

LowerOperatorSpec lower_operator(const OperatorSpec& op, std::span<const double> b, int l,
                                 int n_prime) {
  const int n = op.n();
  const int k = op.k();
  if (l < 0 || l >= k) throw DomainError("lower_operator: need 0 <= l < k");
  if (n_prime < 0 || n_prime > static_cast<int>(b.size())) {
    throw DomainError("lower_operator: need 0 <= N' <= length(b)");
  }
  for (double v : b) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("lower_operator: witness entries must be finite and nonnegative");
    }
  }
  // Witness consistency: sigma_m(b) = (n-k)! alpha_{k-m} / (n-k+m)!.
  const int len = static_cast<int>(b.size());
  const auto sb = elem_sym_all(b, std::max(len, k));
  for (int m = 0; m <= std::max(len, k); ++m) {
    double expected = 0.0;
    if (m <= k) {
      expected = op.alphas()[static_cast<std::size_t>(k - m)] * factorial<double>(n - k) /
                 factorial<double>(n - k + m);
    }
    const double got = sb[static_cast<std::size_t>(m)];
    if (std::abs(got - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      std::ostringstream msg;
      msg << "lower_operator: b is not a witness, sigma_" << m << "(b) = " << got << " but "
          << expected << " expected";
      throw DomainError(msg.str());
    }
  }

  const auto sp = elem_sym_all(b.first(static_cast<std::size_t>(n_prime)), l);
  LowerOperatorSpec out;
  out.l = l;
  out.n_prime = n_prime;
  out.combination.n = n;
  out.combination.coeffs.assign(static_cast<std::size_t>(l) + 1, 0.0);
  for (int j = 0; j <= l; ++j) {
    out.combination.coeffs[static_cast<std::size_t>(l - j)] =
        sp[static_cast<std::size_t>(j)] * factorial<double>(n - l + j) / factorial<double>(n - l);
  }
  return out;
}

}  // namespace symcurv
