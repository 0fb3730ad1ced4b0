#include "symcurv/geometry.hpp"

#include <cmath>
#include <numbers>

#include "symcurv/errors.hpp"

namespace symcurv {

SphereGrid::SphereGrid(int n_lon, int n_lat) : n_lon_(n_lon), n_lat_(n_lat) {
  if (n_lon < 4 || n_lon % 2 != 0) throw DomainError("SphereGrid: n_lon must be even and >= 4");
  if (n_lat < 2) throw DomainError("SphereGrid: n_lat must be >= 2");
}

double SphereGrid::d_theta() const noexcept { return std::numbers::pi / n_lat_; }
double SphereGrid::d_phi() const noexcept { return 2.0 * std::numbers::pi / n_lon_; }
double SphereGrid::theta(int j) const noexcept { return (j + 0.5) * d_theta(); }
double SphereGrid::phi(int i) const noexcept { return i * d_phi(); }

std::size_t SphereGrid::index(int i, int j) const noexcept {
  if (j < 0) {
    j = -1 - j;
    i += n_lon_ / 2;
  } else if (j >= n_lat_) {
    j = 2 * n_lat_ - 1 - j;
    i += n_lon_ / 2;
  }
  i %= n_lon_;
  if (i < 0) i += n_lon_;
  return static_cast<std::size_t>(j) * n_lon_ + static_cast<std::size_t>(i);
}

Eigen::Vector3d SphereGrid::direction(std::size_t node) const {
  const double t = theta(lat_of(node));
  const double p = phi(lon_of(node));
  return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
}

std::array<std::size_t, 9> SphereGrid::stencil(std::size_t node) const {
  const int i = lon_of(node);
  const int j = lat_of(node);
  std::array<std::size_t, 9> out{};
  std::size_t w = 0;
  out[w++] = node;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (di != 0 || dj != 0) out[w++] = index(i + di, j + dj);
    }
  }
  return out;
}

RadialSurfaceField::RadialSurfaceField(SphereGrid grid, std::vector<double> rho)
    : grid_(grid), rho_(std::move(rho)) {
  if (rho_.size() != grid_.size()) {
    throw DomainError("RadialSurfaceField: expected " + std::to_string(grid_.size()) + " values");
  }
  for (double v : rho_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("RadialSurfaceField: rho must be positive and finite");
    }
  }
}

RadialSurfaceField RadialSurfaceField::sphere(const SphereGrid& grid, double radius) {
  return RadialSurfaceField(grid, std::vector<double>(grid.size(), radius));
}

PointGeometry node_geometry(const RadialSurfaceField& surface, std::size_t node) {
  return node_geometry(surface.grid(), node, [&](std::size_t m) { return surface[m]; });
}

std::vector<PointGeometry> surface_geometry(const RadialSurfaceField& surface) {
  std::vector<PointGeometry> out;
  out.reserve(surface.grid().size());
  for (std::size_t node = 0; node < surface.grid().size(); ++node) {
    out.push_back(node_geometry(surface, node));
  }
  return out;
}

double ellipsoid_radius(const Eigen::Vector3d& axes, const Eigen::Vector3d& u) {
  if ((axes.array() <= 0.0).any()) throw DomainError("ellipsoid: axes must be positive");
  return 1.0 / std::sqrt((u.array() / axes.array()).square().sum());
}

std::array<double, 2> ellipsoid_curvatures(const Eigen::Vector3d& axes, const Eigen::Vector3d& u) {
  const Eigen::Vector3d x = ellipsoid_radius(axes, u) * u;
  const Eigen::Vector3d inv2 = axes.array().square().inverse();
  const Eigen::Vector3d grad = 2.0 * x.cwiseProduct(inv2);
  const Eigen::Matrix3d hess = 2.0 * inv2.asDiagonal().toDenseMatrix();
  const Eigen::Vector3d n = grad.normalized();
  // Orthonormal tangent basis.
  Eigen::Vector3d helper = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d t1 = (helper - helper.dot(n) * n).normalized();
  const Eigen::Vector3d t2 = n.cross(t1);
  Eigen::Matrix2d shape;
  shape << t1.dot(hess * t1), t1.dot(hess * t2), t2.dot(hess * t1), t2.dot(hess * t2);
  shape /= grad.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(shape);
  return {eig.eigenvalues()[1], eig.eigenvalues()[0]};
}

RadialSurfaceField ellipsoid_surface(const SphereGrid& grid, const Eigen::Vector3d& axes) {
  std::vector<double> rho(grid.size());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    rho[node] = ellipsoid_radius(axes, grid.direction(node));
  }
  return RadialSurfaceField(grid, std::move(rho));
}

}  // namespace symcurv
