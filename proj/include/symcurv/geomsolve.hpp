#pragma once

// Q(kappa(X)) = psi(X, nu) for starshaped surfaces over the sphere grid:
// right-hand sides, residuals, damped Newton, homotopy continuation, barrier
// checks and curvature diagnostics, plus CSV export.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcurv/combop.hpp"
#include "symcurv/cones.hpp"
#include "symcurv/geometry.hpp"

namespace symcurv {

enum class PsiFamily { Constant, RadialPower, AnisotropicRadial, Manufactured };

/// Right-hand side psi(X, nu) from a closed catalog.
///   Constant:          c
///   RadialPower:       c / |X|^p
///   AnisotropicRadial: (c / |X|^p) (1 + eps <nu, axis>), |eps| < 1
///   Manufactured:      target(u) (source_rho(u) / |X|)^p with u = X/|X|, so the
///                      source surface solves the equation for any p.
struct PsiSpec {
  PsiFamily family = PsiFamily::Constant;
  double c = 1.0;
  double p = 0.0;
  double eps = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  std::function<double(const Eigen::Vector3d&)> target;
  std::function<double(const Eigen::Vector3d&)> source_rho;
  std::string source_name;

  static PsiSpec constant(double c);
  static PsiSpec radial_power(double c, double p);
  static PsiSpec anisotropic(double c, double p, double eps, const Eigen::Vector3d& axis);
  /// Q evaluated on the analytic ellipsoid with the given semi-axes.
  static PsiSpec manufactured_ellipsoid(const OperatorSpec& op, const Eigen::Vector3d& axes,
                                        double p = 0.0);
  /// Q evaluated on a stored surface; only defined at that grid's node directions.
  static PsiSpec manufactured_surface(const OperatorSpec& op, const RadialSurfaceField& surface,
                                      double p = 0.0);

  /// Throws DomainError on invalid parameters (c <= 0, |eps| >= 1, zero axis, ...).
  void validate() const;
  double operator()(const Eigen::Vector3d& X, const Eigen::Vector3d& nu) const;
  std::string describe() const;
};

using PsiFunction = std::function<double(const Eigen::Vector3d&, const Eigen::Vector3d&)>;

/// Q(kappa) at a node from sigma_1 = kappa_1 + kappa_2 and sigma_2 = kappa_1 kappa_2
/// (avoids the square root in kappa at umbilic points).
double q_of_geometry(const OperatorSpec& op, const PointGeometry& g);

/// Per-node Q(kappa) - psi(X, nu). Throws ConeExitError listing the nodes
/// whose kappa leaves the operator's admissible cone.
std::vector<double> residual(const RadialSurfaceField& surface, const OperatorSpec& op,
                             const PsiFunction& psi);
std::vector<double> residual(const RadialSurfaceField& surface, const OperatorSpec& op,
                             const PsiSpec& psi);

/// Nodes whose curvatures leave the admissible cone.
std::vector<std::size_t> inadmissible_nodes(const std::vector<PointGeometry>& geometry,
                                            const OperatorSpec& op);

struct NewtonOptions {
  int max_iter = 30;
  /// Converged when max |residual| <= tol; 0 means 1e-10 * max |psi| at the start.
  double tol = 0.0;
  int max_halvings = 30;
};

struct NewtonDiagnostics {
  bool converged = false;
  int iterations = 0;
  double tol = 0.0;
  std::vector<double> residual_inf;  ///< per iterate, starting with the initial surface
  std::vector<double> residual_l2;
  std::vector<int> halvings;  ///< per accepted step
  bool convex = false;        ///< all kappa > 0 at the returned surface
};

struct NewtonResult {
  RadialSurfaceField surface;
  NewtonDiagnostics diagnostics;
};

/// Damped Newton with a forward-difference Jacobian restricted to stencil
/// dependencies and backtracking on the residual 2-norm. Throws ConeExitError
/// if the initial surface is inadmissible and ConvergenceError on a singular
/// Jacobian, stalled line search or iteration limit.
NewtonResult newton_solve(const RadialSurfaceField& initial, const OperatorSpec& op,
                          const PsiFunction& psi, const NewtonOptions& options = {});
NewtonResult newton_solve(const RadialSurfaceField& initial, const OperatorSpec& op,
                          const PsiSpec& psi, const NewtonOptions& options = {});

struct CurvatureDiagnostics {
  double max_kappa1 = 0.0;
  double min_support = 0.0;
  std::array<double, 3> max_power_sum{};  ///< max_X P_m, m = 2, 6, 10
  std::array<double, 3> max_test{};       ///< max_X log P_m - m Z log u
  bool convex = false;
};

inline constexpr std::array<int, 3> kMonitorPowers = {2, 6, 10};

CurvatureDiagnostics curvature_monitor(const std::vector<PointGeometry>& geometry, double z = 1.0);
CurvatureDiagnostics curvature_monitor(const RadialSurfaceField& surface, double z = 1.0);
/// Maxima over a path (minimum for the support function).
CurvatureDiagnostics merge_monitor(const std::vector<CurvatureDiagnostics>& path);

/// psi^t = (t f^{-1/k} + (1 - t) (Q(1..1) [|X|^{-k} + eps (|X|^{-k} - 1)])^{-1/k})^{-k}.
/// At t = 0 the unit sphere solves the equation.
PsiFunction homotopy_psi(const OperatorSpec& op, const PsiSpec& target, double t, double eps);

struct BarrierOptions {
  double r_inner = 0.0;  ///< 0 selects the single-radius (convex case) check at r_outer
  double r_outer = 0.0;
  long directions = 2000;
  long radial_samples = 16;
  double tol = 1e-9;
  std::uint64_t seed = 1;
};

struct BarrierReport {
  VerificationReport inner;      ///< psi(X, X/|X|) >= Q(1..1)/r1^k on |X| = r1
  VerificationReport outer;      ///< psi(X, X/|X|) <= Q(1..1)/r2^k on |X| = r2
  VerificationReport monotone;   ///< d/drho (rho^k psi) <= 0 on [r1, r2]
  bool single_radius = false;
  bool passed() const;
};

BarrierReport barrier_check(const PsiSpec& psi, const OperatorSpec& op,
                            const BarrierOptions& options);

struct HomotopyOptions {
  int steps = 20;
  double eps = 1e-2;
  double min_step = 1e-4;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double monitor_z = 1.0;
  NewtonOptions newton;
};

struct HomotopyStep {
  double t = 0.0;
  RadialSurfaceField surface;
  CurvatureDiagnostics monitor;
  double residual_norm = 0.0;  ///< max |residual| against psi^t
  int newton_iterations = 0;
};

struct HomotopyResult {
  std::vector<HomotopyStep> path;
  CurvatureDiagnostics path_monitor;
  BarrierReport barrier;
};

/// Continuation from the unit sphere (t = 0) to psi (t = 1) on the given grid.
/// Refuses (DomainError) when barrier_check fails; throws ConvergenceError
/// naming the last accepted t when the step would drop below min_step.
HomotopyResult homotopy_solve(const OperatorSpec& op, const PsiSpec& psi, const SphereGrid& grid,
                              const HomotopyOptions& options);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_solution_csv(const std::string& path, const RadialSurfaceField& surface,
                        const std::vector<double>& residual_values);
void write_path_csv(const std::string& path, const HomotopyResult& result);

}  // namespace symcurv
