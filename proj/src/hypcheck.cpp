#include "symcurv/hypcheck.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "symcurv/rng.hpp"
#include "symcurv/symfun.hpp"

namespace symcurv {
namespace {

int sign(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

std::vector<RationalPoly> sturm_chain(const RationalPoly& p) {
  std::vector<RationalPoly> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    auto rem = divmod(chain[chain.size() - 2], chain.back()).second;
    chain.push_back(-rem);
  }
  chain.pop_back();
  return chain;
}

int sign_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int changes_at(const std::vector<RationalPoly>& chain, const Rational& t) {
  std::vector<int> signs;
  signs.reserve(chain.size());
  for (const auto& q : chain) signs.push_back(sign(q(t)));
  return sign_changes(signs);
}

int changes_at_infinity(const std::vector<RationalPoly>& chain, bool positive) {
  std::vector<int> signs;
  signs.reserve(chain.size());
  for (const auto& q : chain) {
    int s = sign(q.leading());
    if (!positive && q.degree() % 2 == 1) s = -s;
    signs.push_back(s);
  }
  return sign_changes(signs);
}

Rational cauchy_bound(const RationalPoly& p) {
  Rational m = 0;
  for (const auto& c : p.coeffs()) {
    const Rational r = abs(c / p.leading());
    if (r > m) m = r;
  }
  return m + 1;
}

struct Bracket {
  Rational lo;
  Rational hi;  ///< the root lies in (lo, hi]; lo == hi for an exact hit
};

// Brackets for the roots of a square-free p with only real roots, each
// narrowed to about 1e-17 relative.
void isolate(const RationalPoly& p, const std::vector<RationalPoly>& chain, Rational lo,
             Rational hi, int count, std::vector<Bracket>& out) {
  if (count == 0) return;
  if (count == 1) {
    // One simple root in (lo, hi]; p keeps the sign of p(hi) right of it.
    const int s_hi = sign(p(hi));
    if (s_hi == 0) {
      out.push_back({hi, hi});
      return;
    }
    for (int iter = 0; iter < 200; ++iter) {
      const Rational mid = (lo + hi) / 2;
      const int s_mid = sign(p(mid));
      if (s_mid == 0) {
        out.push_back({mid, mid});
        return;
      }
      if (s_mid == s_hi) {
        hi = mid;
      } else {
        lo = mid;
      }
      const double width = to_double(hi - lo);
      if (width <= 1e-17 * std::max(std::abs(to_double(lo)), std::abs(to_double(hi)))) break;
    }
    out.push_back({lo, hi});
    return;
  }
  const Rational mid = (lo + hi) / 2;
  const int left = changes_at(chain, lo) - changes_at(chain, mid);
  isolate(p, chain, lo, mid, left, out);
  isolate(p, chain, mid, hi, count - left, out);
}

// Positive divisors of v, or empty when v is too large to factor by trial division.
std::vector<BigInt> small_divisors(BigInt v) {
  if (v < 0) v = -v;
  if (v == 0 || v > BigInt(1000000000000LL)) return {};
  const long long n = v.convert_to<long long>();
  std::vector<BigInt> low;
  std::vector<BigInt> high;
  for (long long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    low.emplace_back(d);
    if (d != n / d) high.emplace_back(n / d);
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

BigInt floor_of(const Rational& r) {
  BigInt q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
  if (Rational(q) > r) q -= 1;
  return q;
}

// The exact root in the bracket if it is rational. Any rational root p/q in
// lowest terms has q dividing the leading coefficient of the integer form.
std::optional<Rational> rational_root_in(const RationalPoly& f, const std::vector<BigInt>& denominators,
                                         Bracket br) {
  if (br.lo == br.hi) return br.lo;
  const int s_hi = sign(f(br.hi));
  for (const auto& q : denominators) {
    while ((br.hi - br.lo) * q > 4) {
      const Rational mid = (br.lo + br.hi) / 2;
      const int s_mid = sign(f(mid));
      if (s_mid == 0) return mid;
      if (s_mid == s_hi) {
        br.hi = mid;
      } else {
        br.lo = mid;
      }
    }
    for (BigInt num = floor_of(br.lo * q); Rational(num, q) <= br.hi; ++num) {
      const Rational cand(num, q);
      if (cand > br.lo && f(cand) == 0) return cand;
    }
  }
  return std::nullopt;
}

std::vector<BigInt> leading_denominators(const RationalPoly& f) {
  BigInt common = 1;
  for (const auto& c : f.coeffs()) {
    const BigInt d = boost::multiprecision::denominator(c);
    common = common / boost::multiprecision::gcd(common, d) * d;
  }
  const Rational lead = f.leading() * common;
  return small_divisors(boost::multiprecision::numerator(lead));
}

std::complex<double> upper_witness(const RationalPoly& p) {
  std::vector<double> c;
  for (const auto& v : p.coeffs()) c.push_back(to_double(v));
  const auto roots = profile_roots(PolyCoeffs(c));
  std::complex<double> best{0.0, 0.0};
  for (const auto& z : roots) {
    if (z.imag() > best.imag()) best = z;
  }
  return best;
}

}  // namespace

std::vector<Rational> alpha_prime(const OperatorSpec& op) {
  const int n = op.n();
  const int k = op.k();
  std::vector<Rational> out(static_cast<std::size_t>(k) + 1);
  const Rational base = factorial<Rational>(n - k);
  for (int m = 0; m <= k; ++m) {
    out[static_cast<std::size_t>(m)] =
        base * op.exact_alphas()[static_cast<std::size_t>(k - m)] / factorial<Rational>(n - k + m);
  }
  return out;
}

std::vector<Rational> alphas_from_witness(int n, int k, const std::vector<Rational>& b) {
  if (k < 1 || k > n) throw DomainError("alphas_from_witness: need 1 <= k <= n");
  const int top = std::max(static_cast<int>(b.size()), k);
  const auto sig = elem_sym_all(std::span<const Rational>(b), top);
  for (int m = k + 1; m <= top; ++m) {
    if (sig[static_cast<std::size_t>(m)] != 0) {
      throw DomainError("alphas_from_witness: sigma_" + std::to_string(m) +
                        "(b) must vanish beyond degree k");
    }
  }
  std::vector<Rational> alphas(static_cast<std::size_t>(k) + 1);
  for (int m = 0; m <= k; ++m) {
    alphas[static_cast<std::size_t>(k - m)] =
        sig[static_cast<std::size_t>(m)] * factorial<Rational>(n - k + m) / factorial<Rational>(n - k);
  }
  return alphas;
}

std::vector<RationalPoly> square_free_decomposition(const RationalPoly& p) {
  if (p.is_zero()) throw DomainError("square_free_decomposition: zero polynomial");
  std::vector<RationalPoly> factors;
  if (p.degree() == 0) return factors;
  const RationalPoly dp = p.derivative();
  const RationalPoly a0 = gcd(p, dp);
  RationalPoly b = divmod(p, a0).first;
  RationalPoly c = divmod(dp, a0).first;
  RationalPoly d = c - b.derivative();
  while (b.degree() > 0) {
    const RationalPoly a = gcd(b, d);
    factors.push_back(a);
    b = divmod(b, a).first;
    c = divmod(d, a).first;
    d = c - b.derivative();
  }
  return factors;
}

int sturm_real_root_count(const RationalPoly& p) {
  if (p.is_zero()) throw DomainError("sturm_real_root_count: zero polynomial");
  if (p.degree() == 0) return 0;
  const auto chain = sturm_chain(p);
  return changes_at_infinity(chain, false) - changes_at_infinity(chain, true);
}

RealRootResult real_rooted(const RationalPoly& p) {
  if (p.is_zero()) throw DomainError("real_rooted: zero polynomial");
  RealRootResult result;
  result.all_real = true;
  result.roots_exact = true;
  if (p.degree() == 0) return result;

  const auto factors = square_free_decomposition(p);
  for (const auto& f : factors) {
    if (f.degree() > 0 && sturm_real_root_count(f) != f.degree()) {
      result.all_real = false;
      result.roots_exact = false;
      result.witness = upper_witness(p);
      return result;
    }
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    const auto multiplicity = i + 1;
    if (f.degree() <= 0) continue;
    std::vector<double> found;
    if (f.degree() == 1) {
      const Rational r = -f.coeff(0) / f.coeff(1);
      for (std::size_t m = 0; m < multiplicity; ++m) result.exact_roots.push_back(r);
      found.push_back(to_double(r));
    } else {
      const auto chain = sturm_chain(f);
      const Rational bound = cauchy_bound(f);
      std::vector<Bracket> brackets;
      isolate(f, chain, -bound, bound, f.degree(), brackets);
      const auto denominators = leading_denominators(f);
      for (const auto& br : brackets) {
        const auto exact = result.roots_exact ? rational_root_in(f, denominators, br) : std::nullopt;
        if (exact) {
          for (std::size_t m = 0; m < multiplicity; ++m) result.exact_roots.push_back(*exact);
          found.push_back(to_double(*exact));
        } else {
          result.roots_exact = false;
          found.push_back(to_double((br.lo + br.hi) / 2));
        }
      }
    }
    for (double r : found) {
      for (std::size_t m = 0; m < multiplicity; ++m) result.roots.push_back(r);
    }
  }
  std::sort(result.roots.begin(), result.roots.end());
  if (result.roots_exact) {
    std::sort(result.exact_roots.begin(), result.exact_roots.end());
  } else {
    result.exact_roots.clear();
  }
  return result;
}

RealRootResult real_rooted_numeric(const PolyCoeffs& p) {
  if (p.is_zero()) throw DomainError("real_rooted: zero polynomial");
  RealRootResult result;
  result.all_real = true;
  for (const auto& z : profile_roots(p)) {
    if (z.imag() != 0.0) {
      result.all_real = false;
      if (!result.witness || z.imag() > result.witness->imag()) result.witness = z;
    } else {
      result.roots.push_back(z.real());
    }
  }
  if (!result.all_real) result.roots.clear();
  return result;
}

RealRootResult real_rooted(const RationalPoly& p, RootMode mode) {
  if (mode == RootMode::Exact) return real_rooted(p);
  std::vector<double> c;
  for (const auto& v : p.coeffs()) c.push_back(to_double(v));
  if (p.is_zero()) throw DomainError("real_rooted: zero polynomial");
  return real_rooted_numeric(PolyCoeffs(c));
}

ConditionCReport witness_b(int k, const std::vector<Rational>& alphas_prime,
                           const RealRootResult& roots) {
  if (!roots.all_real) throw DomainError("witness_b: the alpha' polynomial has non-real roots");
  if (alphas_prime.empty() || alphas_prime[0] != 1) {
    throw DomainError("witness_b: alpha'_0 must equal 1");
  }
  ConditionCReport report;
  report.alphas_prime = alphas_prime;
  report.all_real = true;
  report.roots = roots.roots;

  const int degree = RationalPoly(alphas_prime).degree();
  const auto n_b = static_cast<std::size_t>(std::max(k, degree));
  const int top = static_cast<int>(alphas_prime.size()) - 1;

  if (roots.roots_exact) {
    std::vector<Rational> b(n_b, Rational(0));
    for (std::size_t i = 0; i < roots.exact_roots.size(); ++i) {
      if (roots.exact_roots[i] >= 0) {
        throw InternalConsistencyError("witness_b: nonnegative root of a positive polynomial");
      }
      b[i] = -1 / roots.exact_roots[i];
    }
    std::sort(b.begin(), b.end(), std::greater<>());
    const auto sig = elem_sym_all(std::span<const Rational>(b), std::max(top, static_cast<int>(n_b)));
    for (std::size_t m = 0; m < sig.size(); ++m) {
      const Rational want = m < alphas_prime.size() ? alphas_prime[m] : Rational(0);
      if (sig[m] != want) {
        throw InternalConsistencyError("witness_b: sigma_" + std::to_string(m) +
                                       "(b) does not reproduce alpha'");
      }
    }
    report.exact_witness_b = b;
    report.witness_exact = true;
    for (const auto& v : b) report.witness_b.push_back(to_double(v));
    return report;
  }

  std::vector<double> b(n_b, 0.0);
  for (std::size_t i = 0; i < roots.roots.size(); ++i) {
    if (roots.roots[i] >= 0.0) {
      throw InternalConsistencyError("witness_b: nonnegative root of a positive polynomial");
    }
    b[i] = -1.0 / roots.roots[i];
  }
  std::sort(b.begin(), b.end(), std::greater<>());
  const auto sig = elem_sym_all(std::span<const double>(b), std::max(top, static_cast<int>(n_b)));
  for (std::size_t m = 0; m < sig.size(); ++m) {
    const double want = m < alphas_prime.size() ? to_double(alphas_prime[m]) : 0.0;
    if (std::abs(sig[m] - want) > 1e-9 * std::max(1.0, std::abs(want))) {
      std::ostringstream msg;
      msg << "witness_b: sigma_" << m << "(b) = " << sig[m] << " but alpha'_" << m << " = " << want;
      throw InternalConsistencyError(msg.str());
    }
  }
  report.witness_b = b;
  return report;
}

ConditionCReport check_condition_c(const OperatorSpec& op) {
  const auto ap = alpha_prime(op);
  const auto roots = real_rooted(RationalPoly(ap));
  if (!roots.all_real) {
    ConditionCReport report;
    report.alphas_prime = ap;
    report.all_real = false;
    report.failure_witness = roots.witness;
    return report;
  }
  return witness_b(op.k(), ap, roots);
}

ConcavityReport check_condition_q(const OperatorSpec& op, const ScanOptions& options,
                                  std::uint64_t seed) {
  const auto cc = check_condition_c(op);
  if (!cc.all_real) {
    throw DomainError("check_condition_q: " + op.describe() +
                      " fails the real-rootedness condition; scan quotient fields directly "
                      "with concavity_scan to search for counterexamples");
  }
  const int n_b = static_cast<int>(cc.witness_b.size());
  std::vector<ConcavityReport> parts;
  for (int l = 1; l < op.k(); ++l) {
    const auto s = lower_operator(op, cc.witness_b, l, n_b);
    parts.push_back(concavity_scan(lower_quotient_field(op, s), options,
                                   seed + 0x9e3779b9ULL * static_cast<std::uint64_t>(l)));
  }
  return merge_concavity("condition Q quotients of " + op.describe(), parts);
}

std::pair<VerificationReport, VerificationReport> guan_scan(const OperatorSpec& op, int l,
                                                            long trials, std::uint64_t seed,
                                                            double delta, double tol) {
  if (l < 0 || l >= op.k()) throw DomainError("guan_scan: need 0 <= l < k");
  const auto cc = check_condition_c(op);
  if (!cc.all_real) throw DomainError("guan_scan: " + op.describe() + " fails the real-rootedness condition");
  GuanCheckInput in{{}, {}, op, lower_operator(op, cc.witness_b, l, static_cast<int>(cc.witness_b.size())),
                    delta, 1.0 / (op.k() - l)};
  const ConeSpec cone = ConeSpec::gamma(op.n(), op.k());
  std::pair<VerificationReport, VerificationReport> out;
  out.first.property = "log-quotient inequality, " + op.describe() + ", l = " + std::to_string(l);
  out.second.property = "delta-weighted inequality, " + op.describe() + ", l = " + std::to_string(l);
  for (auto* r : {&out.first, &out.second}) {
    r->tol = tol;
    r->seed = seed;
  }
  for (long t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    in.W = sample_cone_point(cone, rng);
    double scale = 0.0;
    for (double x : in.W) scale = std::max(scale, std::abs(x));
    in.w.assign(static_cast<std::size_t>(op.n()), 0.0);
    for (double& x : in.w) x = scale * rng.normal();
    const auto res = guan_inequality_check(in);
    out.first.record(res.first / std::max(res.first_scale, 1e-300), in.W, EigenvalueVector(in.w));
    out.second.record(res.second / std::max(res.second_scale, 1e-300), in.W, EigenvalueVector(in.w));
  }
  out.first.finalize();
  out.second.finalize();
  return out;
}

}  // namespace symcurv
