// Acceptance run: one PASS/FAIL line per criterion at the pinned tolerances,
// each with its measured value and runtime. Exit status is nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "symcurv/concave.hpp"
#include "symcurv/cones.hpp"
#include "symcurv/geomsolve.hpp"
#include "symcurv/hypcheck.hpp"
#include "symcurv/rng.hpp"
#include "symcurv/symfun.hpp"

using namespace symcurv;

namespace {

using Vec = std::vector<double>;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < limit_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("criterion %2d %s  %s: %s  [%.2f s, limit %g s%s]\n", id, ok ? "PASS" : "FAIL", title, o.detail.c_str(), dt,
              limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

// 1 ------------------------------------------------------------------------
Outcome condition_c_exactness() {
  long checked = 0;
  long bad = 0;
  for (int n = 2; n <= 8; ++n) {
    for (int k = 1; k < n; ++k) {
      for (const Rational& a : {Rational(0), Rational(1, 3), Rational(1), Rational(7)}) {
        const auto cc = check_condition_c(OperatorSpec::sum_type(n, k, a));
        std::vector<Rational> want(static_cast<std::size_t>(k), Rational(0));
        want[0] = a / (n - k + 1);
        std::vector<Rational> got = cc.exact_witness_b;
        std::sort(got.begin(), got.end(), std::greater<>());
        if (!cc.all_real || !cc.witness_exact || got != want) ++bad;
        ++checked;
      }
    }
  }
  const auto control = check_condition_c(OperatorSpec::make(3, 2, {Rational(1), Rational(0), Rational(1)}));
  const bool control_refuted = !control.all_real && control.failure_witness.has_value();
  std::ostringstream d;
  d << checked << " sum-type operators, " << bad << " without the exact witness; sigma_2+sigma_0 "
    << (control_refuted ? "refuted" : "NOT refuted");
  if (control.failure_witness) d << " (root " << fmt(control.failure_witness->real()) << "+" << fmt(control.failure_witness->imag()) << "i)";
  return {bad == 0 && control_refuted, d.str()};
}

// 2 ------------------------------------------------------------------------
Outcome real_rooted_cross_validation() {
  long disagree = 0;
  long real_count = 0;
  const long trials = 10000;
  for (long t = 0; t < trials; ++t) {
    CounterRng rng(2002, static_cast<std::uint64_t>(t));
    const int d = 1 + static_cast<int>(rng.index(8));
    std::vector<Rational> c(static_cast<std::size_t>(d + 1));
    for (auto& v : c) v = Rational(static_cast<long>(rng.index(19)) - 9);
    while (c.back() == 0) c.back() = Rational(static_cast<long>(rng.index(19)) - 9);
    const RationalPoly p(c);
    const bool exact = real_rooted(p, RootMode::Exact).all_real;
    const bool numeric = real_rooted(p, RootMode::Numeric).all_real;
    if (exact != numeric) ++disagree;
    if (exact) ++real_count;
  }
  std::ostringstream d;
  d << trials << " polynomials (" << real_count << " real-rooted), " << disagree << " disagreements";
  return {disagree == 0, d.str()};
}

// 3 ------------------------------------------------------------------------
Outcome concavity_suites() {
  ScanOptions opts;
  opts.midpoint_trials = 10000;
  opts.hessian_trials = 1000;
  opts.midpoint_tol = 1e-9;
  opts.hessian_tol = 1e-6;
  double worst_mid = std::numeric_limits<double>::infinity();
  double worst_hess = std::numeric_limits<double>::infinity();
  long scans = 0;
  long failed = 0;
  std::string first_failure;
  auto run = [&](const ConcavityReport& r, const std::string& what) {
    ++scans;
    worst_mid = std::min(worst_mid, r.midpoint.worst_value);
    worst_hess = std::min(worst_hess, r.hessian.worst_value);
    if (!r.passed()) {
      ++failed;
      if (first_failure.empty()) first_failure = what;
    }
  };
  std::uint64_t seed = 3000;
  for (auto [n, k] : {std::pair{3, 2}, std::pair{4, 2}, std::pair{4, 3}, std::pair{5, 3}}) {
    for (double alpha : {0.5, 2.0}) {
      const std::string tag = "(" + std::to_string(n) + "," + std::to_string(k) + "," + fmt(alpha) + ")";
      run(concavity_scan(quotient_qk_field(n, k, alpha, k), opts, ++seed), "q_k " + tag);
      run(concavity_scan(sigma_over_q_field(n, k, alpha), opts, ++seed), "sigma_k/Q " + tag);
      for (int l = 0; l < k; ++l) {
        run(concavity_scan(sum_quotient_root_field(n, k, l, alpha), opts, ++seed), "root quotient " + tag);
      }
      run(check_condition_q(OperatorSpec::sum_type(n, k, to_rational(alpha)), opts, ++seed), "lower quotient " + tag);
    }
  }
  ScanOptions control_opts = opts;
  const auto control = concavity_scan(sigma_field(2, 2), control_opts, 3999);
  const bool control_refuted = !control.passed() && control.midpoint.witness.has_value();
  std::ostringstream d;
  d << scans << " scans, " << failed << " failed" << (first_failure.empty() ? "" : " (first: " + first_failure + ")")
    << "; worst midpoint " << fmt(worst_mid) << " (tol 1e-9), worst Hessian " << fmt(worst_hess)
    << " (tol 1e-6); sigma_2 control " << (control_refuted ? "refuted at " + fmt(control.midpoint.worst_value) : "NOT refuted");
  return {failed == 0 && control_refuted, d.str()};
}

// 4 ------------------------------------------------------------------------
Outcome q1_identity() {
  const long trials = 10000;
  double worst = 0.0;
  for (long t = 0; t < trials; ++t) {
    CounterRng rng(4004, static_cast<std::uint64_t>(t));
    const int n = 2 + static_cast<int>(rng.index(6));
    const double alpha = rng.log_uniform(-2, 2);
    const auto lam = sample_cone_point(ConeSpec::gamma(n, 1), rng);
    const double s1 = sigma_ext(lam.values(), 1);
    Vec xi(static_cast<std::size_t>(n));
    double xi_inf = 0.0;
    for (auto& v : xi) {
      v = rng.normal();
      xi_inf = std::max(xi_inf, std::abs(v));
    }
    // keep lambda +- xi admissible: |sigma_1(xi)| < sigma_1(lambda)
    const double shrink = rng.uniform(0.01, 0.9) * s1 / (n * xi_inf);
    for (auto& v : xi) v *= shrink;
    Vec plus = lam.vector();
    Vec minus = lam.vector();
    for (int i = 0; i < n; ++i) {
      plus[static_cast<std::size_t>(i)] += xi[static_cast<std::size_t>(i)];
      minus[static_cast<std::size_t>(i)] -= xi[static_cast<std::size_t>(i)];
    }
    const auto [lhs, rhs] = q1_closed_form_check(lam.values(), xi, alpha);
    // relative to the terms the left side is assembled from
    const double scale = 2 * std::abs(quotient_q(1, alpha, lam.values())) + std::abs(quotient_q(1, alpha, plus)) +
                         std::abs(quotient_q(1, alpha, minus));
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return {worst <= 1e-10, std::to_string(trials) + " instances, worst relative gap " + fmt(worst) + " (tol 1e-10)"};
}

// 5 ------------------------------------------------------------------------
Outcome convexity_and_ellipticity() {
  double worst_seg = std::numeric_limits<double>::infinity();
  double worst_ell = std::numeric_limits<double>::infinity();
  bool ok = true;
  std::uint64_t seed = 5000;
  for (auto [n, k, alpha] : {std::tuple{3, 2, 0.5}, std::tuple{3, 2, 2.0}, std::tuple{5, 3, 1.0}}) {
    const auto seg = segment_convexity_check(ConeSpec::tilde(n, k, alpha, 1e-12), 10000, ++seed);
    worst_seg = std::min(worst_seg, seg.worst_value);
    ok = ok && seg.passed;
    const auto ell = ellipticity_scan(OperatorSpec::sum_type(n, k, to_rational(alpha)), 10000, ++seed);
    worst_ell = std::min(worst_ell, ell.worst_value);
    ok = ok && ell.passed && ell.worst_value > 0.0;
  }
  return {ok, "3 configurations x 1e4 segments, worst margin " + fmt(worst_seg) + " (tol -1e-12); min normalized Q^ii " +
                  fmt(worst_ell) + " (> 0)"};
}

// 6 ------------------------------------------------------------------------
Outcome matrix_second_derivative() {
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; checked < 100; ++trial) {
    CounterRng rng(6006, static_cast<std::uint64_t>(trial));
    const int n = 2 + static_cast<int>(rng.index(5));
    Vec a(static_cast<std::size_t>(n));
    for (auto& v : a) v = rng.uniform(-3, 3);
    std::sort(a.begin(), a.end());
    bool gap_ok = true;
    for (int i = 1; i < n; ++i) gap_ok = gap_ok && a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i - 1)] >= 0.1;
    if (!gap_ok) continue;
    ++checked;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) B(i, j) = B(j, i) = rng.uniform(-1, 1);
    }
    const int k = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));
    const Eigen::MatrixXd A = Eigen::Map<const Eigen::VectorXd>(a.data(), n).asDiagonal();
    // second differences at h and h/2, Richardson-combined to O(h^4)
    auto second_difference = [&](double h) {
      return (oracle::sigma_of_eigenvalues(A + h * B, k) - 2 * oracle::sigma_of_eigenvalues(A, k) +
              oracle::sigma_of_eigenvalues(A - h * B, k)) /
             (h * h);
    };
    const double fd = (4 * second_difference(5e-4) - second_difference(1e-3)) / 3;
    const double exact = matrix_symfun_second_derivative(k, a, B);
    worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
  }
  return {worst <= 1e-5, "100 instances, worst relative error " + fmt(worst) + " (tol 1e-5)"};
}

// 7 ------------------------------------------------------------------------
Outcome guan_diagonal() {
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  long scans = 0;
  for (int n = 3; n <= 5; ++n) {
    for (const Rational& a : {Rational(0), Rational(1, 3), Rational(1), Rational(7)}) {
      const auto [first, second] = guan_scan(OperatorSpec::sum_type(n, 2, a), 1, 10000, 7000 + scans, 1.0, 1e-9);
      worst = std::min(worst, first.worst_value);
      ok = ok && first.passed;
      ++scans;
    }
  }
  return {ok, std::to_string(scans) + " operators x 1e4 (W in Gamma_2, w), k-l = 1; worst residual/scale " + fmt(worst) +
                  " (tol -1e-9)"};
}

// 8 ------------------------------------------------------------------------
Outcome solver_sphere() {
  const SphereGrid grid(32, 16);
  const auto op = OperatorSpec::sum_type(2, 2, Rational(1));
  // smooth noise: a.u + u^T B u, normalized to max 1
  CounterRng rng(7, 0);
  Eigen::Vector3d a;
  for (int i = 0; i < 3; ++i) a(i) = rng.normal();
  Eigen::Matrix3d B;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) B(i, j) = B(j, i) = rng.normal();
  }
  Vec noise(grid.size());
  double m = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Eigen::Vector3d u = grid.direction(node);
    noise[node] = a.dot(u) + u.dot(B * u);
    m = std::max(m, std::abs(noise[node]));
  }
  Vec rho(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) rho[node] = 2.0 * (1.0 + 0.05 * noise[node] / m);
  const double psi = q_eval(op, Vec{0.5, 0.5});
  const auto res = newton_solve(RadialSurfaceField(grid, rho), op, PsiSpec::constant(psi));
  double err = 0.0;
  for (double r : res.surface.rho()) err = std::max(err, std::abs(r - 2.0));
  const int it = res.diagnostics.iterations;
  return {res.diagnostics.converged && err <= 1e-8 && it <= 12,
          "32x16, psi = " + fmt(psi) + ", " + std::to_string(it) + " iterations (<= 12), max|rho-2| " + fmt(err) +
              " (tol 1e-8)"};
}

// 9 ------------------------------------------------------------------------
double manufactured_error(int n_lon, int n_lat) {
  const SphereGrid grid(n_lon, n_lat);
  const auto op = OperatorSpec::sum_type(2, 2, Rational(1));
  const Eigen::Vector3d axes(1.0, 1.0, 1.2);
  const auto res = newton_solve(RadialSurfaceField::sphere(grid, 1.1), op, PsiSpec::manufactured_ellipsoid(op, axes));
  double err = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    err = std::max(err, std::abs(res.surface[node] - oracle::ellipsoid_point(axes, grid.direction(node)).norm()));
  }
  return err;
}

Outcome solver_manufactured() {
  const double coarse = manufactured_error(32, 16);
  const double fine = manufactured_error(64, 32);
  const double ratio = coarse / fine;
  return {ratio >= 3.0, "L-inf rho error " + fmt(coarse) + " (32x16), " + fmt(fine) + " (64x32), ratio " + fmt(ratio) +
                            " (>= 3)"};
}

// 10 -----------------------------------------------------------------------
Outcome homotopy_monitor() {
  const auto op = OperatorSpec::sum_type(2, 2, Rational(1));
  const auto psi = PsiSpec::anisotropic(3.0, 3.0, 0.1, Eigen::Vector3d::UnitZ());
  HomotopyOptions opts;
  opts.r_inner = 0.8;
  opts.r_outer = 1.25;
  const SphereGrid grid(32, 16);
  const auto res = homotopy_solve(op, psi, grid, opts);
  double final_res = 0.0;
  for (double v : residual(res.path.back().surface, op, psi)) final_res = std::max(final_res, std::abs(v));
  const double k1 = res.path_monitor.max_kappa1;
  const bool ok = res.barrier.passed() && res.path.back().t == 1.0 && final_res <= 1e-8 && std::isfinite(k1);
  return {ok, "eps 0.1, barrier passed (margins " + fmt(res.barrier.inner.worst_value) + ", " +
                  fmt(res.barrier.outer.worst_value) + "), " + std::to_string(res.path.size() - 1) +
                  " steps to t = 1, final residual " + fmt(final_res) + " (tol 1e-8), max-over-path kappa_1 " + fmt(k1)};
}

}  // namespace

int main() {
  criterion(1, "condition C exactness", 1, condition_c_exactness);
  criterion(2, "real_rooted cross-validation", 60, real_rooted_cross_validation);
  criterion(3, "concavity suites", 300, concavity_suites);
  criterion(4, "closed-form q_1 identity", 10, q1_identity);
  criterion(5, "cone convexity and ellipticity", 60, convexity_and_ellipticity);
  criterion(6, "matrix second derivative", 10, matrix_second_derivative);
  criterion(7, "diagonal log-quotient inequality", 60, guan_diagonal);
  criterion(8, "solver: sphere", 60, solver_sphere);
  criterion(9, "solver: manufactured ellipsoid", 600, solver_manufactured);
  criterion(10, "homotopy and curvature monitor", 600, homotopy_monitor);
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
