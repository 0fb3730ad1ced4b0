#pragma once

// Starshaped surfaces X = rho(u) u over a half-offset latitude-longitude grid
// on S^2, with second-order finite differences and cross-pole closure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "symcurv/eigenvalue_vector.hpp"

namespace symcurv {

/// Colatitudes theta_j = (j + 1/2) pi / n_lat, longitudes phi_i = 2 pi i / n_lon.
/// No node sits on a pole; the row beyond a pole is the first row shifted by pi.
class SphereGrid {
 public:
  /// Throws DomainError unless n_lon >= 4 is even and n_lat >= 2.
  SphereGrid(int n_lon, int n_lat);

  int n_lon() const noexcept { return n_lon_; }
  int n_lat() const noexcept { return n_lat_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_lon_) * n_lat_; }
  double d_theta() const noexcept;
  double d_phi() const noexcept;
  double theta(int j) const noexcept;
  double phi(int i) const noexcept;

  /// Node index of (i, j); i wraps, j in [-1, n_lat] maps across the pole.
  std::size_t index(int i, int j) const noexcept;
  int lon_of(std::size_t node) const noexcept { return static_cast<int>(node % n_lon_); }
  int lat_of(std::size_t node) const noexcept { return static_cast<int>(node / n_lon_); }

  Eigen::Vector3d direction(std::size_t node) const;
  /// The 3x3 difference stencil of a node (center first), pole-mapped.
  std::array<std::size_t, 9> stencil(std::size_t node) const;

  friend bool operator==(const SphereGrid&, const SphereGrid&) = default;

 private:
  int n_lon_;
  int n_lat_;
};

class RadialSurfaceField {
 public:
  /// Throws DomainError unless rho has grid.size() positive finite entries.
  RadialSurfaceField(SphereGrid grid, std::vector<double> rho);
  static RadialSurfaceField sphere(const SphereGrid& grid, double radius);

  const SphereGrid& grid() const noexcept { return grid_; }
  std::span<const double> rho() const noexcept { return rho_; }
  double operator[](std::size_t node) const { return rho_[node]; }

 private:
  SphereGrid grid_;
  std::vector<double> rho_;
};

struct PointGeometry {
  Eigen::Vector3d X;
  Eigen::Vector3d nu;
  EigenvalueVector kappa;  ///< principal curvatures, descending
  double mean2 = 0.0;      ///< kappa_1 + kappa_2 = sigma_1
  double gauss = 0.0;      ///< kappa_1 kappa_2 = sigma_2
  double support = 0.0;    ///< <X, nu>
};

/// Geometry at one node from the values of rho on its stencil. rho_of maps a
/// node index to rho; it lets callers probe perturbed fields without copies.
template <class RhoOf>
PointGeometry node_geometry(const SphereGrid& grid, std::size_t node, const RhoOf& rho_of);

/// Throws DomainError for nonpositive rho.
std::vector<PointGeometry> surface_geometry(const RadialSurfaceField& surface);
PointGeometry node_geometry(const RadialSurfaceField& surface, std::size_t node);

/// rho of the ellipsoid sum x_i^2 / a_i^2 = 1 in direction u (unit).
double ellipsoid_radius(const Eigen::Vector3d& axes, const Eigen::Vector3d& u);
/// Principal curvatures (descending) of that ellipsoid at the point in direction u,
/// from the shape operator P Hess F P / |grad F| of F = sum x_i^2/a_i^2 - 1.
std::array<double, 2> ellipsoid_curvatures(const Eigen::Vector3d& axes, const Eigen::Vector3d& u);
RadialSurfaceField ellipsoid_surface(const SphereGrid& grid, const Eigen::Vector3d& axes);

// ---------------------------------------------------------------------------

template <class RhoOf>
PointGeometry node_geometry(const SphereGrid& grid, std::size_t node, const RhoOf& rho_of) {
  const int i = grid.lon_of(node);
  const int j = grid.lat_of(node);
  const double dt = grid.d_theta();
  const double dp = grid.d_phi();
  auto r = [&](int di, int dj) { return rho_of(grid.index(i + di, j + dj)); };

  const double rho = r(0, 0);
  const double r_t = (r(0, 1) - r(0, -1)) / (2.0 * dt);
  const double r_p = (r(1, 0) - r(-1, 0)) / (2.0 * dp);
  const double r_tt = (r(0, 1) - 2.0 * rho + r(0, -1)) / (dt * dt);
  const double r_pp = (r(1, 0) - 2.0 * rho + r(-1, 0)) / (dp * dp);
  const double r_tp = (r(1, 1) - r(-1, 1) - r(1, -1) + r(-1, -1)) / (4.0 * dt * dp);

  const double theta = grid.theta(j);
  const double phi = grid.phi(i);
  const double s = std::sin(theta);
  const double c = std::cos(theta);

  // Covariant Hessian of rho on the unit sphere in (theta, phi) coordinates.
  const double hess_tt = r_tt;
  const double hess_tp = r_tp - (c / s) * r_p;
  const double hess_pp = r_pp + s * c * r_t;

  const double w = std::sqrt(rho * rho + r_t * r_t + r_p * r_p / (s * s));
  const double g_tt = rho * rho + r_t * r_t;
  const double g_tp = r_t * r_p;
  const double g_pp = rho * rho * s * s + r_p * r_p;
  const double h_tt = (rho * rho + 2.0 * r_t * r_t - rho * hess_tt) / w;
  const double h_tp = (2.0 * r_t * r_p - rho * hess_tp) / w;
  const double h_pp = (rho * rho * s * s + 2.0 * r_p * r_p - rho * hess_pp) / w;

  const double det_g = g_tt * g_pp - g_tp * g_tp;
  const double gauss = (h_tt * h_pp - h_tp * h_tp) / det_g;
  const double mean2 = (g_tt * h_pp + g_pp * h_tt - 2.0 * g_tp * h_tp) / det_g;
  const double half = 0.5 * mean2;
  const double disc = std::sqrt(std::max(half * half - gauss, 0.0));

  const Eigen::Vector3d u(s * std::cos(phi), s * std::sin(phi), c);
  const Eigen::Vector3d e_t(c * std::cos(phi), c * std::sin(phi), -s);
  const Eigen::Vector3d e_p(-std::sin(phi), std::cos(phi), 0.0);

  PointGeometry g;
  g.X = rho * u;
  g.nu = (rho * u - r_t * e_t - (r_p / s) * e_p) / w;
  g.kappa = EigenvalueVector{half + disc, half - disc};
  g.mean2 = mean2;
  g.gauss = gauss;
  g.support = rho * rho / w;
  return g;
}

}  // namespace symcurv
