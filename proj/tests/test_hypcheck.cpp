#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "symcurv/hypcheck.hpp"
#include "symcurv/rng.hpp"

using namespace symcurv;

namespace {

using Vec = std::vector<double>;
using RVec = std::vector<Rational>;

RationalPoly from_int_roots(const std::vector<long>& roots) {
  RationalPoly p = RationalPoly::constant(Rational(1));
  for (long r : roots) p = p * RationalPoly(RVec{Rational(-r), Rational(1)});
  return p;
}

RVec sorted_desc(RVec v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

TEST_CASE("alpha_prime examples") {
  CHECK(alpha_prime(OperatorSpec::sum_type(5, 3, Rational(3))) == RVec{Rational(1), Rational(1), Rational(0), Rational(0)});
  CHECK(alpha_prime(OperatorSpec::sum_type(4, 2, Rational(1, 3))) == RVec{Rational(1), Rational(1, 9), Rational(0)});
  CHECK(alpha_prime(OperatorSpec::pure(4, 2)) == RVec{Rational(1), Rational(0), Rational(0)});
  // sigma_2 + sigma_0 in R^3: alpha'_2 = 1! * 1 / 3!
  CHECK(alpha_prime(OperatorSpec::make(3, 2, {Rational(1), Rational(0), Rational(1)})) ==
        RVec{Rational(1), Rational(0), Rational(1, 6)});
}

TEST_CASE("real_rooted examples") {
  const auto r = real_rooted(from_int_roots({-1, -2, 3}));
  CHECK(r.all_real);
  CHECK(r.roots_exact);
  REQUIRE(r.roots.size() == 3);
  CHECK(r.roots[0] == doctest::Approx(-2));
  CHECK(r.roots[2] == doctest::Approx(3));

  const auto dbl = real_rooted(from_int_roots({-1, -1, 2}));
  CHECK(dbl.all_real);
  CHECK(dbl.roots.size() == 3);
  CHECK(dbl.exact_roots == RVec{Rational(-1), Rational(-1), Rational(2)});

  const auto cx = real_rooted(RationalPoly(RVec{Rational(1), Rational(0), Rational(1)}));
  CHECK_FALSE(cx.all_real);
  REQUIRE(cx.witness.has_value());
  CHECK(cx.witness->imag() == doctest::Approx(1.0));

  CHECK(real_rooted(RationalPoly::constant(Rational(5))).all_real);
  CHECK_THROWS_AS(real_rooted(RationalPoly()), DomainError);

  // (2t + 3)(t - 1/2): rational, non-integer roots
  const auto half = real_rooted(RationalPoly(RVec{Rational(-3, 2), Rational(2), Rational(2)}));
  CHECK(half.roots_exact);
  CHECK(half.exact_roots == RVec{Rational(-3, 2), Rational(1, 2)});
}

TEST_CASE("Sturm count and square-free parts") {
  const RationalPoly q = RationalPoly(RVec{Rational(1), Rational(0), Rational(1)});
  CHECK(sturm_real_root_count(from_int_roots({-1, -1, 2}) * q) == 2);
  CHECK(sturm_real_root_count(q) == 0);
  CHECK(sturm_real_root_count(from_int_roots({0, 1, 2, 3, 4})) == 5);

  const auto sf = square_free_decomposition(from_int_roots({1, 2, 2, 3, 3, 3}));
  REQUIRE(sf.size() == 3);
  for (const auto& f : sf) CHECK(f.degree() == 1);

  for (int trial = 0; trial < 200; ++trial) {
    CounterRng rng(401, static_cast<std::uint64_t>(trial));
    std::vector<long> roots;
    const int d = 1 + static_cast<int>(rng.index(7));
    for (int i = 0; i < d; ++i) roots.push_back(static_cast<long>(rng.index(9)) - 4);
    std::vector<long> distinct = roots;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto p = from_int_roots(roots);
    CHECK(sturm_real_root_count(p) == static_cast<int>(distinct.size()));
    CHECK(sturm_real_root_count(p * q) == static_cast<int>(distinct.size()));
    CHECK(real_rooted(p).all_real);
    CHECK_FALSE(real_rooted(p * q).all_real);
  }
}

TEST_CASE("exact and numeric modes agree on random integer polynomials") {
  long disagreements = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    CounterRng rng(402, static_cast<std::uint64_t>(trial));
    const int d = 1 + static_cast<int>(rng.index(8));
    RVec c(static_cast<std::size_t>(d + 1));
    for (auto& v : c) v = Rational(static_cast<long>(rng.index(19)) - 9);
    if (c.back() == 0) c.back() = Rational(1);
    const RationalPoly p(c);
    if (real_rooted(p, RootMode::Exact).all_real != real_rooted(p, RootMode::Numeric).all_real) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("witness_b round-trips through alphas_from_witness") {
  const std::vector<std::pair<int, RVec>> cases = {
      {5, {Rational(1, 2), Rational(1, 3), Rational(2)}},
      {4, {Rational(1), Rational(1), Rational(1)}},
      {6, {Rational(3), Rational(0), Rational(1, 7), Rational(1)}},
      {3, {Rational(2), Rational(0)}},
  };
  for (const auto& [n, b] : cases) {
    const int k = static_cast<int>(b.size());
    const auto op = OperatorSpec::make(n, k, alphas_from_witness(n, k, b));
    const auto cc = check_condition_c(op);
    CHECK(cc.all_real);
    CHECK(cc.witness_exact);
    CHECK(sorted_desc(cc.exact_witness_b) == sorted_desc(b));
    for (double v : cc.witness_b) CHECK(v >= 0.0);
    // sigma_m(b) reproduces alpha'
    const auto ap = alpha_prime(op);
    for (int m = 0; m <= k; ++m) CHECK(oracle::sigma(cc.exact_witness_b, m) == ap[static_cast<std::size_t>(m)]);
  }
}

TEST_CASE("binomial family from b = (1, 1, 1)") {
  // sigma_m(1,1,1) = C(3, m), so alpha_{k-m} = C(3, m) (n-k+m)! / (n-k)!
  const int n = 5;
  const int k = 3;
  const auto alphas = alphas_from_witness(n, k, {Rational(1), Rational(1), Rational(1)});
  CHECK(alphas == RVec{Rational(60), Rational(36), Rational(9), Rational(1)});
  const auto cc = check_condition_c(OperatorSpec::make(n, k, alphas));
  CHECK(cc.witness_b == Vec{1, 1, 1});
}

TEST_CASE("Condition C on sum-type and failing operators") {
  for (int n = 2; n <= 8; ++n) {
    for (int k = 1; k < n; ++k) {
      for (const Rational& a : {Rational(0), Rational(1, 3), Rational(1), Rational(7)}) {
        const auto cc = check_condition_c(OperatorSpec::sum_type(n, k, a));
        CHECK(cc.all_real);
        REQUIRE(cc.exact_witness_b.size() == static_cast<std::size_t>(k));
        CHECK(cc.exact_witness_b[0] == a / (n - k + 1));
        for (std::size_t i = 1; i < cc.exact_witness_b.size(); ++i) CHECK(cc.exact_witness_b[i] == 0);
      }
    }
  }
  const auto fail = check_condition_c(OperatorSpec::make(3, 2, {Rational(1), Rational(0), Rational(1)}));
  CHECK_FALSE(fail.all_real);
  REQUIRE(fail.failure_witness.has_value());
  CHECK(fail.failure_witness->imag() == doctest::Approx(std::sqrt(6.0)));
  CHECK(fail.witness_b.empty());
}

TEST_CASE("check_condition_q") {
  ScanOptions small;
  small.midpoint_trials = 300;
  small.hessian_trials = 30;
  CHECK(check_condition_q(OperatorSpec::sum_type(3, 2, Rational(1)), small, 11).passed());
  CHECK(check_condition_q(OperatorSpec::pure(4, 3), small, 12).passed());
  const auto op = OperatorSpec::make(5, 3, alphas_from_witness(5, 3, {Rational(1, 2), Rational(1, 3), Rational(2)}));
  const auto rep = check_condition_q(op, small, 13);
  CHECK(rep.passed());
  CHECK(rep.midpoint.trials > 0);
  CHECK_THROWS_AS(check_condition_q(OperatorSpec::make(3, 2, {Rational(1), Rational(0), Rational(1)}), small, 14),
                  DomainError);
}

TEST_CASE("guan_scan") {
  const auto [first, second] = guan_scan(OperatorSpec::sum_type(4, 3, Rational(1)), 2, 500, 21);
  CHECK(first.passed);
  CHECK(first.trials == 500);
  CHECK(second.trials == 500);
  CHECK(first.worst_value >= -1e-9);
  CHECK_THROWS_AS(guan_scan(OperatorSpec::sum_type(4, 3, Rational(1)), 3, 10, 21), DomainError);
  CHECK_THROWS_AS(guan_scan(OperatorSpec::make(3, 2, {Rational(1), Rational(0), Rational(1)}), 1, 10, 21),
                  DomainError);
}
