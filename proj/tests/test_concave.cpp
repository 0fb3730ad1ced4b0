#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "symcurv/concave.hpp"
#include "symcurv/hypcheck.hpp"
#include "symcurv/rng.hpp"
#include "symcurv/symfun.hpp"

using namespace symcurv;

namespace {

using Vec = std::vector<double>;

ScanOptions small_scan(long midpoint, long hessian) {
  ScanOptions o;
  o.midpoint_trials = midpoint;
  o.hessian_trials = hessian;
  return o;
}

double q_oracle(const OperatorSpec& op, const Vec& x) {
  double total = 0.0;
  for (int s = 0; s <= op.k(); ++s) total += op.alphas()[static_cast<std::size_t>(s)] * oracle::sigma(x, s);
  return total;
}

double s_oracle(const LowerOperatorSpec& s, const Vec& x) {
  double total = 0.0;
  for (std::size_t j = 0; j < s.combination.coeffs.size(); ++j) {
    total += s.combination.coeffs[j] * oracle::sigma(x, static_cast<int>(j));
  }
  return total;
}

// First and second derivatives of t -> f(W + t w) at 0 by central differences.
std::pair<double, double> along(const std::function<double(const Vec&)>& f, const Vec& W, const Vec& w, double h) {
  auto at = [&](double t) {
    Vec y = W;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * w[i];
    return f(y);
  };
  const double d1 = (at(h) - at(-h)) / (2 * h);
  const double d2 = (at(h) - 2 * at(0) + at(-h)) / (h * h);
  return {d1, d2};
}

}  // namespace

TEST_CASE("fd_hessian examples") {
  const auto bilinear = custom_field("x1 x2", 2, std::nullopt, [](std::span<const double> x) { return x[0] * x[1]; });
  const Eigen::MatrixXd H = fd_hessian(bilinear, Vec{0.3, -2.0}, 1e-3);
  CHECK(H(0, 0) == doctest::Approx(0.0));
  CHECK(H(0, 1) == doctest::Approx(1.0));
  CHECK(H(1, 0) == doctest::Approx(1.0));

  const auto bowl = custom_field("-|x|^2", 3, std::nullopt, [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s -= v * v;
    return s;
  });
  const Eigen::MatrixXd B = fd_hessian(bowl, Vec{1, 2, 3}, 1e-3);
  CHECK((B + 2 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);

  const Vec x{1.0, 2.0, 0.5};
  const Eigen::MatrixXd S = fd_hessian(sigma_field(3, 2), x, 1e-3);
  CHECK((S - sigma_hess(x, 2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("field domains") {
  CHECK_THROWS_AS(sigma_root_field(3, 2)(Vec{-1, -1, -1}), ConeExitError);
  CHECK(sigma_root_field(3, 2)(Vec{1, 1, 1}) == doctest::Approx(std::sqrt(3.0)));
  const auto f = sigma_root_field(3, 2);
  const Vec x{1.0, 0.2, 0.1};
  const double r = domain_reach(f, x);
  REQUIRE(r > 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (double s : {-r, r}) {
      Vec y = x;
      y[i] += s;
      CHECK(f.in_domain(y));
    }
  }
}

TEST_CASE("adaptive Hessian against the analytic Hessian of sigma_2^(1/2)") {
  const auto f = sigma_root_field(4, 2);
  for (const auto& p : sample_cone(ConeSpec::gamma(4, 2), 50, 501)) {
    const Vec x = p.vector();
    const double s = oracle::sigma(x, 2);
    const auto g = sigma_grad<double>(x, 2);
    const Eigen::Map<const Eigen::VectorXd> gv(g.data(), 4);
    const Eigen::MatrixXd want = sigma_hess(x, 2) / (2 * std::sqrt(s)) - gv * gv.transpose() / (4 * std::pow(s, 1.5));
    const auto got = fd_hessian_adaptive(f, x);
    CHECK((got.hessian - want).cwiseAbs().maxCoeff() < 1e-6 * (1 + want.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("concavity_scan controls") {
  const auto linear = concavity_scan(sigma_field(3, 1), small_scan(500, 50), 1);
  CHECK(linear.passed());
  CHECK(std::abs(linear.midpoint.worst_value) < 1e-9);

  const auto product = concavity_scan(sigma_field(2, 2), small_scan(500, 50), 2);
  CHECK_FALSE(product.passed());
  CHECK(product.midpoint.worst_value < -1e-3);
  REQUIRE(product.midpoint.witness.has_value());

  CHECK(concavity_scan(sigma_root_field(3, 2), small_scan(500, 50), 3).passed());
  CHECK(concavity_scan(sigma_root_field(5, 4), small_scan(500, 50), 4).passed());
}

TEST_CASE("q1 closed form") {
  CHECK(q1_closed_form_check(Vec{1, 2, 3}, Vec{0, 0, 0}, 1.0) == std::pair{0.0, 0.0});
  long checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    CounterRng rng(502, static_cast<std::uint64_t>(trial));
    const int n = 2 + static_cast<int>(rng.index(5));
    const double alpha = rng.uniform(0, 3);
    Vec lam(static_cast<std::size_t>(n));
    Vec xi(static_cast<std::size_t>(n));
    for (auto& v : lam) v = rng.uniform(0.1, 2);
    for (auto& v : xi) v = rng.uniform(-0.3, 0.3);
    // oracle for the left side straight from sigma sums
    auto q1 = [&](const Vec& y) { return (oracle::sigma(y, 2) + alpha * oracle::sigma(y, 1)) / (oracle::sigma(y, 1) + alpha); };
    Vec plus = lam;
    Vec minus = lam;
    for (int i = 0; i < n; ++i) {
      plus[static_cast<std::size_t>(i)] += xi[static_cast<std::size_t>(i)];
      minus[static_cast<std::size_t>(i)] -= xi[static_cast<std::size_t>(i)];
    }
    const double lhs = 2 * q1(lam) - q1(plus) - q1(minus);
    const auto [got_lhs, rhs] = q1_closed_form_check(lam, xi, alpha);
    CHECK(got_lhs == doctest::Approx(lhs).epsilon(1e-9).scale(1.0));
    CHECK(std::abs(got_lhs - rhs) <= 1e-10 * (1 + std::abs(rhs)));
    CHECK(rhs >= 0.0);
    ++checked;
  }
  CHECK(checked == 2000);
}

TEST_CASE("guan_inequality_check against finite differences") {
  const std::vector<std::pair<OperatorSpec, int>> cases = {
      {OperatorSpec::sum_type(4, 3, Rational(1)), 2},
      {OperatorSpec::sum_type(5, 3, Rational(7)), 1},
      {OperatorSpec::make(5, 3, alphas_from_witness(5, 3, {Rational(1, 2), Rational(1, 3), Rational(2)})), 2},
  };
  for (const auto& [op, l] : cases) {
    const auto b = check_condition_c(op).witness_b;
    const auto S = lower_operator(op, b, l, static_cast<int>(b.size()));
    const double beta = 1.0 / (op.k() - l);
    for (const auto& W : sample_cone(ConeSpec::gamma(op.n(), op.k()), 40, 503)) {
      CounterRng rng(504, 0);
      Vec w(static_cast<std::size_t>(op.n()));
      for (auto& v : w) v = rng.normal();
      const GuanCheckInput in{W, w, op, S, 1.0, beta};
      const auto r = guan_inequality_check(in);

      const Vec Wv = W.vector();
      const double q = q_oracle(op, Wv);
      const double s = s_oracle(S, Wv);
      const auto [dq, d2q] = along([&](const Vec& y) { return q_oracle(op, y); }, Wv, w, 1e-4);
      const auto [ds, d2s] = along([&](const Vec& y) { return s_oracle(S, y); }, Wv, w, 1e-4);
      const double a = dq / q;
      const double bb = ds / s;
      const double want = -d2q / q + d2s / s - (a - bb) * ((beta - 1) * a - (beta + 1) * bb);
      CHECK(std::abs(r.first - want) < 1e-5 * (1 + r.first_scale));
      CHECK(r.first >= -1e-9 * r.first_scale);
    }
  }

  const auto op = OperatorSpec::sum_type(3, 2, Rational(1));
  const auto S = lower_operator(op, check_condition_c(op).witness_b, 1, 2);
  const auto zero = guan_inequality_check({EigenvalueVector{1, 1, 1}, Vec{0, 0, 0}, op, S, 1.0, 1.0});
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);
  CHECK_THROWS_AS(guan_inequality_check({EigenvalueVector{1, 1, 1}, Vec{1, 0, 0}, op, S, 0.0, 1.0}), DomainError);
}

TEST_CASE("quotient fields are concave on their cones") {
  const auto opts = small_scan(400, 40);
  for (auto [n, k, al] : {std::tuple{3, 2, 0.5}, std::tuple{4, 3, 2.0}}) {
    CHECK(concavity_scan(quotient_qk_field(n, k, al, k), opts, 10).passed());
    CHECK(concavity_scan(quotient_qk_field(n, k - 1, al, k), opts, 11).passed());
    CHECK(concavity_scan(sigma_over_q_field(n, k, al), opts, 12).passed());
    for (int l = 0; l < k; ++l) CHECK(concavity_scan(sum_quotient_root_field(n, k, l, al), opts, 13).passed());
  }
  const auto op = OperatorSpec::make(5, 3, alphas_from_witness(5, 3, {Rational(1, 2), Rational(1, 3), Rational(2)}));
  const auto b = check_condition_c(op).witness_b;
  for (int l = 1; l < 3; ++l) {
    const auto S = lower_operator(op, b, l, static_cast<int>(b.size()));
    CHECK(concavity_scan(lower_quotient_field(op, S), opts, 14).passed());
  }
}
