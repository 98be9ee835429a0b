#pragma once

// Shared problem fixtures for unit and acceptance tests.

#include "bvc/assembly.hpp"
#include "bvc/mesh.hpp"

namespace fixture {

inline bvc::ImplicitDomain unit_square_affine() {
  return bvc::convex_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0.3, 1.2, -0.7);
}

inline bvc::Mesh square_mesh(bvc::CellKind kind, int n, const bvc::ImplicitDomain& domain, int points) {
  bvc::Mesh mesh = kind == bvc::CellKind::triangle ? bvc::build_rectangle_tri_mesh(n, n, {0, 0}, {1, 1})
                                                   : bvc::build_rectangle_quad_mesh(n, n, {0, 0}, {1, 1});
  return bvc::precompute_boundary_geometry(std::move(mesh), domain, points);
}

// Square [0,1]² meshed inside the larger square [-c, 1+c]²: ρ_h ≡ c.
inline bvc::ImplicitDomain offset_square(double c) {
  return bvc::convex_polygon_domain({{-c, -c}, {1 + c, -c}, {1 + c, 1 + c}, {-c, 1 + c}}, 0.3, 1.2, -0.7);
}

}  // namespace fixture
