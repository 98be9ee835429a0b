#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bvc/types.hpp"

namespace bvc {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Exact domain given implicitly by a level set (negative inside), together
/// with a manufactured solution and its derived data f = -Δu, g = u|∂Ω.
struct ImplicitDomain {
  std::string name;
  ScalarField level_set;
  VectorField level_set_gradient;
  ScalarField u_exact;
  VectorField grad_u_exact;
  ScalarField f_rhs;
  ScalarField g_dirichlet;
  // Half-width of the tube around ∂Ω in which ray casting and closest-point
  // projection are trusted.
  double delta0 = 0.1;
  // Upper bound of |∇level_set| inside the tube; |level_set(x)| ≤
  // lipschitz·delta0 is the admissibility test for tube membership.
  double lipschitz = 1.0;
  // Optional closed-form closest-point map (circles, annuli).
  VectorField analytic_closest_point;
};

/// Annulus 1/4 ≤ r ≤ 3/4 with u = (r - 1/4)(3/4 - r). Level set
/// max(1/4 - r, r - 3/4), which is the exact signed distance.
ImplicitDomain ring_domain();

/// Interior of x²/4 + y² = 1 with u = sin(x³) cos(8y³).
ImplicitDomain ellipse_domain();

/// Unit disc with level set x² + y² - 1 and u = 1 - x² - y².
ImplicitDomain unit_circle_domain();

/// Convex polygon (counterclockwise vertices) whose level set is the max of
/// the edge-line signed distances, carrying the affine solution
/// u = c0 + c1 x + c2 y. Meshes of the polygon itself have ρ_h ≡ 0.
ImplicitDomain convex_polygon_domain(std::vector<Vec2> vertices, double c0,
                                     double c1, double c2);

Vec2 exact_normal(const ImplicitDomain& domain, const Vec2& y);

/// Signed length ς of the ray x + ς n_h to the nearest crossing of ∂Ω within
/// [-delta0, delta0]. Positive when ∂Ω lies outward of x along n_h.
double ray_distance(const ImplicitDomain& domain, const Vec2& x,
                    const Vec2& n_h);

/// x + ray_distance(x, n_h)·n_h, a point on ∂Ω.
Vec2 pullback_point(const ImplicitDomain& domain, const Vec2& x,
                    const Vec2& n_h);

Vec2 closest_point(const ImplicitDomain& domain, const Vec2& x);

}  // namespace bvc
