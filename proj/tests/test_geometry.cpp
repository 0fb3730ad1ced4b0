#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "symcurv/errors.hpp"
#include "symcurv/geometry.hpp"

using namespace symcurv;

namespace {

Eigen::Vector3d spherical(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

struct EllipsoidErrors {
  double gauss = 0.0;
  double mean = 0.0;
};

EllipsoidErrors ellipsoid_errors(const Eigen::Vector3d& axes, int n_lon, int n_lat) {
  const SphereGrid grid(n_lon, n_lat);
  const auto geo = surface_geometry(ellipsoid_surface(grid, axes));
  EllipsoidErrors e;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Eigen::Vector3d p = oracle::ellipsoid_point(axes, grid.direction(node));
    const auto want = oracle::ellipsoid_closed_form(axes, p);
    e.gauss = std::max(e.gauss, std::abs(geo[node].gauss - want.gauss));
    e.mean = std::max(e.mean, std::abs(geo[node].mean2 - want.mean_sum));
  }
  return e;
}

}  // namespace

TEST_CASE("grid validation and layout") {
  CHECK_THROWS_AS(SphereGrid(3, 4), DomainError);
  CHECK_THROWS_AS(SphereGrid(5, 4), DomainError);
  CHECK_THROWS_AS(SphereGrid(8, 1), DomainError);
  const SphereGrid grid(8, 4);
  CHECK(grid.size() == 32);
  CHECK(grid.theta(0) == doctest::Approx(std::numbers::pi / 8));
  CHECK(grid.phi(2) == doctest::Approx(std::numbers::pi / 2));
  for (std::size_t node = 0; node < grid.size(); ++node) {
    CHECK(std::abs(grid.direction(node).z()) < 1.0 - 1e-3);
    CHECK(grid.direction(node).norm() == doctest::Approx(1.0));
    CHECK(grid.stencil(node)[0] == node);
  }
  CHECK(grid.index(-1, 0) == grid.index(7, 0));
  CHECK(grid.index(8, 2) == grid.index(0, 2));
}

TEST_CASE("rows beyond the poles are the reflected rows") {
  const SphereGrid grid(12, 6);
  const double dt = grid.d_theta();
  for (int i = 0; i < grid.n_lon(); ++i) {
    // theta = -dt/2 and pi + dt/2 continue the coordinate lines across the poles
    const Eigen::Vector3d north = spherical(-0.5 * dt, grid.phi(i));
    const Eigen::Vector3d south = spherical(std::numbers::pi + 0.5 * dt, grid.phi(i));
    CHECK((grid.direction(grid.index(i, -1)) - north).norm() < 1e-12);
    CHECK((grid.direction(grid.index(i, grid.n_lat())) - south).norm() < 1e-12);
  }
}

TEST_CASE("sphere geometry is exact") {
  const SphereGrid grid(16, 8);
  for (double r : {0.5, 1.0, 3.0}) {
    const auto geo = surface_geometry(RadialSurfaceField::sphere(grid, r));
    for (std::size_t node = 0; node < grid.size(); ++node) {
      const auto& g = geo[node];
      CHECK(g.kappa[0] == doctest::Approx(1.0 / r).epsilon(1e-12));
      CHECK(g.kappa[1] == doctest::Approx(1.0 / r).epsilon(1e-12));
      CHECK(g.mean2 == doctest::Approx(2.0 / r).epsilon(1e-12));
      CHECK(g.gauss == doctest::Approx(1.0 / (r * r)).epsilon(1e-12));
      CHECK(g.support == doctest::Approx(r).epsilon(1e-12));
      CHECK((g.nu - grid.direction(node)).norm() < 1e-12);
      CHECK((g.X - r * grid.direction(node)).norm() < 1e-12);
    }
  }
}

TEST_CASE("surface field validation") {
  const SphereGrid grid(4, 2);
  CHECK_THROWS_AS(RadialSurfaceField(grid, std::vector<double>(8, -1.0)), DomainError);
  CHECK_THROWS_AS(RadialSurfaceField(grid, std::vector<double>(7, 1.0)), DomainError);
  std::vector<double> bad(8, 1.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(RadialSurfaceField(grid, bad), DomainError);
}

TEST_CASE("ellipsoid helpers against the classical closed forms") {
  const Eigen::Vector3d axes(1.0, 1.3, 0.8);
  const SphereGrid grid(16, 8);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Eigen::Vector3d u = grid.direction(node);
    const Eigen::Vector3d p = oracle::ellipsoid_point(axes, u);
    CHECK(ellipsoid_radius(axes, u) == doctest::Approx(p.norm()).epsilon(1e-13));
    const auto k = ellipsoid_curvatures(axes, u);
    const auto want = oracle::ellipsoid_closed_form(axes, p);
    CHECK(k[0] >= k[1]);
    CHECK(k[0] * k[1] == doctest::Approx(want.gauss).epsilon(1e-11));
    CHECK(k[0] + k[1] == doctest::Approx(want.mean_sum).epsilon(1e-11));
  }
}

TEST_CASE("finite-difference curvature converges at second order on an ellipsoid") {
  const Eigen::Vector3d axes(1.0, 1.3, 0.8);
  const auto coarse = ellipsoid_errors(axes, 64, 32);
  const auto fine = ellipsoid_errors(axes, 128, 64);
  CHECK(coarse.gauss < 0.05);
  CHECK(coarse.gauss / fine.gauss > 3.0);
  CHECK(coarse.mean / fine.mean > 3.0);
  CHECK(coarse.gauss / fine.gauss < 5.0);
}

TEST_CASE("node_geometry with a probing functor matches the stored field") {
  const SphereGrid grid(16, 8);
  const auto surf = ellipsoid_surface(grid, Eigen::Vector3d(1.0, 1.2, 0.9));
  const auto all = surface_geometry(surf);
  for (std::size_t node = 0; node < grid.size(); node += 5) {
    const auto g = node_geometry(grid, node, [&](std::size_t m) { return surf[m]; });
    CHECK(g.gauss == all[node].gauss);
    CHECK(g.mean2 == all[node].mean2);
    CHECK(node_geometry(surf, node).support == all[node].support);
  }
}
