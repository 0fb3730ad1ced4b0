#include "symcurv/geomsolve.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "symcurv/rng.hpp"
#include "symcurv/symfun.hpp"

namespace symcurv {
namespace {

void require_surface_operator(const OperatorSpec& op) {
  if (op.n() != 2) throw DomainError("surface solver: operator dimension must be 2");
}

double q_theta(const OperatorSpec& op) {
  double q = 0.0;
  for (int s = 0; s <= op.k(); ++s) q += op.alphas()[static_cast<std::size_t>(s)] * binomial<double>(op.n(), s);
  return q;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Eigen::Vector3d random_unit(CounterRng& rng) {
  Eigen::Vector3d v;
  do {
    v = {rng.normal(), rng.normal(), rng.normal()};
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// Nodes whose residual depends on rho at each node (inverse of the stencils).
std::vector<std::vector<std::size_t>> dependents(const SphereGrid& grid) {
  std::vector<std::vector<std::size_t>> deps(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    for (std::size_t m : grid.stencil(node)) {
      auto& list = deps[m];
      if (std::find(list.begin(), list.end(), node) == list.end()) list.push_back(node);
    }
  }
  return deps;
}

struct Evaluation {
  std::vector<PointGeometry> geometry;
  std::vector<double> residual;
  std::vector<std::size_t> bad;
};

Evaluation evaluate(const RadialSurfaceField& surface, const OperatorSpec& op,
                    const PsiFunction& psi) {
  Evaluation e;
  e.geometry = surface_geometry(surface);
  e.bad = inadmissible_nodes(e.geometry, op);
  e.residual.resize(e.geometry.size());
  for (std::size_t i = 0; i < e.geometry.size(); ++i) {
    const auto& g = e.geometry[i];
    e.residual[i] = q_of_geometry(op, g) - psi(g.X, g.nu);
  }
  return e;
}

[[noreturn]] void throw_cone_exit(const std::vector<std::size_t>& bad) {
  std::ostringstream msg;
  msg << "surface leaves the admissible cone at " << bad.size() << " node(s):";
  for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) msg << ' ' << bad[i];
  if (bad.size() > 10) msg << " ...";
  throw ConeExitError(msg.str(), {}, bad);
}

}  // namespace

PsiSpec PsiSpec::constant(double c) {
  PsiSpec s;
  s.family = PsiFamily::Constant;
  s.c = c;
  s.validate();
  return s;
}

PsiSpec PsiSpec::radial_power(double c, double p) {
  PsiSpec s;
  s.family = PsiFamily::RadialPower;
  s.c = c;
  s.p = p;
  s.validate();
  return s;
}

PsiSpec PsiSpec::anisotropic(double c, double p, double eps, const Eigen::Vector3d& axis) {
  PsiSpec s;
  s.family = PsiFamily::AnisotropicRadial;
  s.c = c;
  s.p = p;
  s.eps = eps;
  if (!(axis.norm() > 0.0)) throw DomainError("psi: axis must be nonzero");
  s.axis = axis.normalized();
  s.validate();
  return s;
}

PsiSpec PsiSpec::manufactured_ellipsoid(const OperatorSpec& op, const Eigen::Vector3d& axes,
                                        double p) {
  require_surface_operator(op);
  if ((axes.array() <= 0.0).any()) throw DomainError("psi: ellipsoid axes must be positive");
  PsiSpec s;
  s.family = PsiFamily::Manufactured;
  s.p = p;
  const SigmaCombination combo = op.combination();
  s.target = [combo, axes](const Eigen::Vector3d& u) {
    const auto k = ellipsoid_curvatures(axes, u);
    const std::array<double, 3> sig = {1.0, k[0] + k[1], k[0] * k[1]};
    return combo.eval_from_sigmas(sig);
  };
  s.source_rho = [axes](const Eigen::Vector3d& u) { return ellipsoid_radius(axes, u); };
  std::ostringstream name;
  name << "ellipsoid(" << axes.x() << "," << axes.y() << "," << axes.z() << ")";
  s.source_name = name.str();
  s.validate();
  return s;
}

PsiSpec PsiSpec::manufactured_surface(const OperatorSpec& op, const RadialSurfaceField& surface,
                                      double p) {
  require_surface_operator(op);
  const auto geometry = surface_geometry(surface);
  auto values = std::make_shared<std::vector<double>>();
  for (const auto& g : geometry) values->push_back(q_of_geometry(op, g));
  auto rho = std::make_shared<std::vector<double>>(surface.rho().begin(), surface.rho().end());
  const SphereGrid grid = surface.grid();
  auto locate = [grid](const Eigen::Vector3d& u) {
    const double theta = std::acos(std::clamp(u.z() / u.norm(), -1.0, 1.0));
    double phi = std::atan2(u.y(), u.x());
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    const double fj = theta / grid.d_theta() - 0.5;
    const double fi = phi / grid.d_phi();
    const long j = std::lround(fj);
    long i = std::lround(fi);
    if (std::abs(fj - static_cast<double>(j)) > 1e-6 || std::abs(fi - static_cast<double>(i)) > 1e-6 ||
        j < 0 || j >= grid.n_lat()) {
      throw DomainError("manufactured psi: direction is not a node of the stored surface's grid");
    }
    if (i == grid.n_lon()) i = 0;
    return grid.index(static_cast<int>(i), static_cast<int>(j));
  };
  PsiSpec s;
  s.family = PsiFamily::Manufactured;
  s.p = p;
  s.target = [values, locate](const Eigen::Vector3d& u) { return (*values)[locate(u)]; };
  s.source_rho = [rho, locate](const Eigen::Vector3d& u) { return (*rho)[locate(u)]; };
  s.source_name = "stored surface " + std::to_string(grid.n_lon()) + "x" + std::to_string(grid.n_lat());
  s.validate();
  return s;
}

void PsiSpec::validate() const {
  if (!std::isfinite(c) || !std::isfinite(p) || !std::isfinite(eps)) {
    throw DomainError("psi: parameters must be finite");
  }
  switch (family) {
    case PsiFamily::Constant:
    case PsiFamily::RadialPower:
      if (!(c > 0.0)) throw DomainError("psi: c must be positive");
      break;
    case PsiFamily::AnisotropicRadial:
      if (!(c > 0.0)) throw DomainError("psi: c must be positive");
      if (!(std::abs(eps) < 1.0)) throw DomainError("psi: |eps| must be below 1");
      if (!(std::abs(axis.norm() - 1.0) < 1e-12)) throw DomainError("psi: axis must be a unit vector");
      break;
    case PsiFamily::Manufactured:
      if (!target || !source_rho) throw DomainError("psi: manufactured family needs a source");
      break;
  }
}

double PsiSpec::operator()(const Eigen::Vector3d& X, const Eigen::Vector3d& nu) const {
  const double r = X.norm();
  switch (family) {
    case PsiFamily::Constant:
      return c;
    case PsiFamily::RadialPower:
      return c / std::pow(r, p);
    case PsiFamily::AnisotropicRadial:
      return c / std::pow(r, p) * (1.0 + eps * nu.dot(axis));
    case PsiFamily::Manufactured: {
      const Eigen::Vector3d u = X / r;
      const double base = target(u);
      return p == 0.0 ? base : base * std::pow(source_rho(u) / r, p);
    }
  }
  return 0.0;
}

std::string PsiSpec::describe() const {
  std::ostringstream out;
  switch (family) {
    case PsiFamily::Constant:
      out << "psi = " << c;
      break;
    case PsiFamily::RadialPower:
      out << "psi = " << c << " / |X|^" << p;
      break;
    case PsiFamily::AnisotropicRadial:
      out << "psi = " << c << " / |X|^" << p << " * (1 + " << eps << " <nu, (" << axis.x() << ","
          << axis.y() << "," << axis.z() << ")>)";
      break;
    case PsiFamily::Manufactured:
      out << "psi = Q on " << source_name << " (p = " << p << ")";
      break;
  }
  return out.str();
}

double q_of_geometry(const OperatorSpec& op, const PointGeometry& g) {
  require_surface_operator(op);
  const std::array<double, 3> sig = {1.0, g.mean2, g.gauss};
  return op.combination().eval_from_sigmas(sig);
}

std::vector<std::size_t> inadmissible_nodes(const std::vector<PointGeometry>& geometry,
                                            const OperatorSpec& op) {
  const ConeSpec cone = op.admissible_cone();
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    if (!cone.contains(geometry[i].kappa)) bad.push_back(i);
  }
  return bad;
}

std::vector<double> residual(const RadialSurfaceField& surface, const OperatorSpec& op,
                             const PsiFunction& psi) {
  require_surface_operator(op);
  auto e = evaluate(surface, op, psi);
  if (!e.bad.empty()) throw_cone_exit(e.bad);
  return e.residual;
}

std::vector<double> residual(const RadialSurfaceField& surface, const OperatorSpec& op,
                             const PsiSpec& psi) {
  return residual(surface, op, PsiFunction(std::cref(psi)));
}

NewtonResult newton_solve(const RadialSurfaceField& initial, const OperatorSpec& op,
                          const PsiFunction& psi, const NewtonOptions& options) {
  require_surface_operator(op);
  const SphereGrid& grid = initial.grid();
  const std::size_t n = grid.size();
  const auto deps = dependents(grid);

  std::vector<double> rho(initial.rho().begin(), initial.rho().end());
  auto current = evaluate(initial, op, psi);
  if (!current.bad.empty()) throw_cone_exit(current.bad);

  NewtonDiagnostics diag;
  double psi_scale = 0.0;
  for (const auto& g : current.geometry) psi_scale = std::max(psi_scale, std::abs(psi(g.X, g.nu)));
  diag.tol = options.tol > 0.0 ? options.tol : 1e-10 * std::max(psi_scale, 1e-300);

  const double fd = std::sqrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (int iter = 0;; ++iter) {
    diag.residual_inf.push_back(max_abs(current.residual));
    diag.residual_l2.push_back(norm2(current.residual));
    if (diag.residual_inf.back() <= diag.tol) {
      diag.converged = true;
      diag.iterations = iter;
      break;
    }
    if (iter >= options.max_iter) {
      throw ConvergenceError("newton_solve: no convergence in " + std::to_string(options.max_iter) +
                             " iterations (max residual " + format_double(diag.residual_inf.back()) +
                             ")");
    }

    jac.setZero();
    for (std::size_t m = 0; m < n; ++m) {
      const double delta = fd * rho[m];
      const double bumped = rho[m] + delta;
      const double step = bumped - rho[m];
      for (std::size_t d : deps[m]) {
        const auto g = node_geometry(grid, d, [&](std::size_t q) { return q == m ? bumped : rho[q]; });
        const double f = q_of_geometry(op, g) - psi(g.X, g.nu);
        jac(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)) = (f - current.residual[d]) / step;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (!(lu.rcond() > 1e-14)) {
      throw ConvergenceError("newton_solve: singular Jacobian (rcond " + format_double(lu.rcond()) + ")");
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(current.residual.data(),
                                                                  static_cast<Eigen::Index>(n));
    const Eigen::VectorXd dir = -lu.solve(rhs);

    const double f_norm = diag.residual_l2.back();
    double lambda = 1.0;
    bool accepted = false;
    int halvings = 0;
    for (; halvings <= options.max_halvings; ++halvings, lambda *= 0.5) {
      std::vector<double> trial(n);
      bool positive = true;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = rho[i] + lambda * dir[static_cast<Eigen::Index>(i)];
        positive = positive && trial[i] > 0.0 && std::isfinite(trial[i]);
      }
      if (!positive) continue;
      const RadialSurfaceField candidate(grid, trial);
      auto next = evaluate(candidate, op, psi);
      if (!next.bad.empty()) continue;
      if (norm2(next.residual) < (1.0 - 1e-4 * lambda) * f_norm) {
        rho = std::move(trial);
        current = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("newton_solve: no residual decrease after " +
                             std::to_string(options.max_halvings) + " halvings (max residual " +
                             format_double(diag.residual_inf.back()) + ")");
    }
    diag.halvings.push_back(halvings);
  }
  diag.convex = std::all_of(current.geometry.begin(), current.geometry.end(),
                            [](const PointGeometry& g) { return g.kappa[1] > 0.0; });
  return {RadialSurfaceField(grid, std::move(rho)), std::move(diag)};
}

NewtonResult newton_solve(const RadialSurfaceField& initial, const OperatorSpec& op,
                          const PsiSpec& psi, const NewtonOptions& options) {
  return newton_solve(initial, op, PsiFunction(std::cref(psi)), options);
}

CurvatureDiagnostics curvature_monitor(const std::vector<PointGeometry>& geometry, double z) {
  CurvatureDiagnostics d;
  d.max_kappa1 = -std::numeric_limits<double>::infinity();
  d.min_support = std::numeric_limits<double>::infinity();
  d.max_power_sum.fill(-std::numeric_limits<double>::infinity());
  d.max_test.fill(-std::numeric_limits<double>::infinity());
  d.convex = true;
  for (const auto& g : geometry) {
    d.max_kappa1 = std::max(d.max_kappa1, g.kappa[0]);
    d.min_support = std::min(d.min_support, g.support);
    d.convex = d.convex && g.kappa[1] > 0.0;
    for (std::size_t m = 0; m < kMonitorPowers.size(); ++m) {
      const int power = kMonitorPowers[m];
      const double pm = std::pow(g.kappa[0], power) + std::pow(g.kappa[1], power);
      d.max_power_sum[m] = std::max(d.max_power_sum[m], pm);
      d.max_test[m] = std::max(d.max_test[m], std::log(pm) - power * z * std::log(g.support));
    }
  }
  return d;
}

CurvatureDiagnostics curvature_monitor(const RadialSurfaceField& surface, double z) {
  return curvature_monitor(surface_geometry(surface), z);
}

CurvatureDiagnostics merge_monitor(const std::vector<CurvatureDiagnostics>& path) {
  if (path.empty()) throw DomainError("merge_monitor: empty path");
  CurvatureDiagnostics d = path.front();
  for (const auto& p : path) {
    d.max_kappa1 = std::max(d.max_kappa1, p.max_kappa1);
    d.min_support = std::min(d.min_support, p.min_support);
    for (std::size_t m = 0; m < d.max_power_sum.size(); ++m) {
      d.max_power_sum[m] = std::max(d.max_power_sum[m], p.max_power_sum[m]);
      d.max_test[m] = std::max(d.max_test[m], p.max_test[m]);
    }
    d.convex = d.convex && p.convex;
  }
  return d;
}

PsiFunction homotopy_psi(const OperatorSpec& op, const PsiSpec& target, double t, double eps) {
  require_surface_operator(op);
  if (t < 0.0 || t > 1.0) throw DomainError("homotopy_psi: t must lie in [0, 1]");
  const double k = op.k();
  const double q = q_theta(op);
  return [target, t, eps, k, q](const Eigen::Vector3d& X, const Eigen::Vector3d& nu) {
    const double inv = std::pow(X.norm(), -k);
    const double radial = q * (inv + eps * (inv - 1.0));
    if (t == 1.0) return target(X, nu);
    if (!(radial > 0.0)) {
      throw DomainError("homotopy_psi: radial datum is not positive at |X| = " + format_double(X.norm()));
    }
    if (t == 0.0) return radial;
    const double f = target(X, nu);
    return std::pow(t * std::pow(f, -1.0 / k) + (1.0 - t) * std::pow(radial, -1.0 / k), -k);
  };
}

bool BarrierReport::passed() const {
  if (single_radius) return outer.passed;
  return inner.passed && outer.passed && monotone.passed;
}

BarrierReport barrier_check(const PsiSpec& psi, const OperatorSpec& op,
                            const BarrierOptions& options) {
  require_surface_operator(op);
  psi.validate();
  const double k = op.k();
  const double q = q_theta(op);
  const double r1 = options.r_inner;
  const double r2 = options.r_outer;
  BarrierReport report;
  report.single_radius = r1 == 0.0;
  if (!(r2 > 0.0) || (!report.single_radius && !(r1 > 0.0 && r1 < r2))) {
    throw DomainError("barrier_check: need 0 < r1 < r2 (or r1 = 0 with r2 > 0)");
  }
  auto init = [&](VerificationReport& v, const std::string& name) {
    v.property = name;
    v.tol = options.tol;
    v.seed = options.seed;
  };
  init(report.outer, report.single_radius ? "psi <= Q(1..1)/r^k on |X| = r"
                                          : "psi <= Q(1..1)/r2^k on |X| = r2");
  init(report.inner, "psi >= Q(1..1)/r1^k on |X| = r1");
  init(report.monotone, "d/drho (rho^k psi) <= 0");

  for (long d = 0; d < options.directions; ++d) {
    CounterRng rng(options.seed, static_cast<std::uint64_t>(d));
    const Eigen::Vector3d u = random_unit(rng);
    const Eigen::Vector3d nu = random_unit(rng);
    auto vec = [](const Eigen::Vector3d& a) { return EigenvalueVector{a.x(), a.y(), a.z()}; };

    const double bound2 = q / std::pow(r2, k);
    report.outer.record((bound2 - psi(r2 * u, u)) / bound2, vec(r2 * u));
    if (report.single_radius) continue;

    const double bound1 = q / std::pow(r1, k);
    report.inner.record((psi(r1 * u, u) - bound1) / bound1, vec(r1 * u));

    for (long s = 0; s < options.radial_samples; ++s) {
      const double rho = r1 + (r2 - r1) * static_cast<double>(s) /
                                  static_cast<double>(std::max<long>(options.radial_samples - 1, 1));
      const double h = 1e-5 * rho;
      auto g = [&](double r) { return std::pow(r, k) * psi(r * u, nu); };
      const double deriv = (g(rho + h) - g(rho - h)) / (2.0 * h);
      report.monotone.record(-deriv * rho / std::abs(g(rho)), vec(rho * u), vec(nu));
    }
  }
  report.outer.finalize();
  report.inner.finalize();
  report.monotone.finalize();
  return report;
}

HomotopyResult homotopy_solve(const OperatorSpec& op, const PsiSpec& psi, const SphereGrid& grid,
                              const HomotopyOptions& options) {
  require_surface_operator(op);
  if (options.steps < 1) throw DomainError("homotopy_solve: steps must be at least 1");
  if (!(options.r_outer > 0.0)) throw DomainError("homotopy_solve: barrier radius r_outer required");
  HomotopyResult result;
  BarrierOptions bopt;
  bopt.r_inner = options.r_inner;
  bopt.r_outer = options.r_outer;
  result.barrier = barrier_check(psi, op, bopt);
  if (!result.barrier.passed()) {
    throw DomainError("homotopy_solve: refused, psi fails the barrier check (" +
                      (result.barrier.inner.passed ? (result.barrier.outer.passed
                                                          ? result.barrier.monotone.property
                                                          : result.barrier.outer.property)
                                                   : result.barrier.inner.property) +
                      ")");
  }

  auto accept = [&](double t, NewtonResult&& solved, const PsiFunction& f) {
    const auto geometry = surface_geometry(solved.surface);
    HomotopyStep step{t, solved.surface, curvature_monitor(geometry, options.monitor_z), 0.0,
                      solved.diagnostics.iterations};
    double worst = 0.0;
    for (const auto& g : geometry) worst = std::max(worst, std::abs(q_of_geometry(op, g) - f(g.X, g.nu)));
    step.residual_norm = worst;
    result.path.push_back(std::move(step));
  };

  const auto psi0 = homotopy_psi(op, psi, 0.0, options.eps);
  accept(0.0, newton_solve(RadialSurfaceField::sphere(grid, 1.0), op, psi0, options.newton), psi0);

  const double base = 1.0 / options.steps;
  double t = 0.0;
  double dt = base;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    const auto f = homotopy_psi(op, psi, t_next, options.eps);
    try {
      accept(t_next, newton_solve(result.path.back().surface, op, f, options.newton), f);
      t = t_next;
      dt = std::min(2.0 * dt, base);
    } catch (const ConvergenceError&) {
      dt *= 0.5;
    } catch (const DomainError&) {
      dt *= 0.5;
    }
    if (dt < options.min_step) {
      throw ConvergenceError("homotopy_solve: step fell below " + format_double(options.min_step) +
                             " after last accepted t = " + format_double(t));
    }
  }
  std::vector<CurvatureDiagnostics> monitors;
  for (const auto& s : result.path) monitors.push_back(s.monitor);
  result.path_monitor = merge_monitor(monitors);
  return result;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_solution_csv(const std::string& path, const RadialSurfaceField& surface,
                        const std::vector<double>& residual_values) {
  const auto& grid = surface.grid();
  if (residual_values.size() != grid.size()) throw DomainError("write_solution_csv: size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lon_index,lat_index,phi,theta,rho,kappa1,kappa2,support,residual\n";
  const auto geometry = surface_geometry(surface);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const int i = grid.lon_of(node);
    const int j = grid.lat_of(node);
    const auto& g = geometry[node];
    out << i << ',' << j << ',' << format_double(grid.phi(i)) << ',' << format_double(grid.theta(j))
        << ',' << format_double(surface[node]) << ',' << format_double(g.kappa[0]) << ','
        << format_double(g.kappa[1]) << ',' << format_double(g.support) << ','
        << format_double(residual_values[node]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_path_csv(const std::string& path, const HomotopyResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,max_kappa1,min_support,residual_norm\n";
  for (const auto& s : result.path) {
    out << format_double(s.t) << ',' << format_double(s.monitor.max_kappa1) << ','
        << format_double(s.monitor.min_support) << ',' << format_double(s.residual_norm) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace symcurv
