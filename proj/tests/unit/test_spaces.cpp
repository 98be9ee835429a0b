#include <doctest.h>

#include <cmath>

#include "bvc/error.hpp"
#include "bvc/field.hpp"
#include "bvc/quadrature.hpp"
#include "bvc/spaces.hpp"
#include "oracles.hpp"

using namespace bvc;
using doctest::Approx;

namespace {

double integrate(const QuadratureRule& rule, int a, int b) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    sum += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
  return sum;
}

Mesh single_triangle() { return Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2, -1}}, CellKind::triangle); }

}  // namespace

TEST_CASE("quadrature examples") {
  const auto seg = quadrature(QuadratureDomain::segment, 3);
  CHECK(seg.size() == 2);
  double s3 = 0.0;
  for (std::size_t q = 0; q < seg.size(); ++q) s3 += seg.weights[q] * std::pow(seg.points[q].x(), 3);
  CHECK(std::abs(s3 - 0.25) <= 1e-15);

  const auto tri = quadrature(QuadratureDomain::triangle, 2);
  CHECK(tri.size() == 3);
  CHECK(std::abs(integrate(tri, 2, 0) - 1.0 / 12.0) <= 1e-15);

  const auto quad = quadrature(QuadratureDomain::quad, 5);
  CHECK(quad.size() == 9);
  CHECK(std::abs(integrate(quad, 4, 4) - 1.0 / 25.0) <= 1e-15);
}

TEST_CASE("property: quadrature exactness up to degree 20") {
  for (int d = 0; d <= 20; ++d) {
    const auto tri = quadrature(QuadratureDomain::triangle, d);
    const auto quad = quadrature(QuadratureDomain::quad, d);
    const auto seg = quadrature(QuadratureDomain::segment, d);
    CHECK(tri.exactness >= d);
    double wsum = 0.0;
    for (double w : tri.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - 0.5) <= 1e-14);
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        CHECK(std::abs(integrate(tri, a, b) - oracle::triangle_monomial(a, b)) <= 1e-13);
        CHECK(std::abs(integrate(quad, a, b) - 1.0 / ((a + 1) * (b + 1))) <= 1e-13);
      }
      double s = 0.0;
      for (std::size_t q = 0; q < seg.size(); ++q) s += seg.weights[q] * std::pow(seg.points[q].x(), a);
      CHECK(std::abs(s - 1.0 / (a + 1)) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(quadrature(QuadratureDomain::triangle, 21), UnsupportedDegree);
  CHECK_THROWS_AS(quadrature(QuadratureDomain::quad, -1), UnsupportedDegree);
}

TEST_CASE("Legendre polynomials and derivatives") {
  for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    CHECK(legendre(0, x) == 1.0);
    CHECK(legendre(1, x) == Approx(x));
    CHECK(legendre(2, x) == Approx(0.5 * (3 * x * x - 1)));
    CHECK(legendre(3, x) == Approx(0.5 * (5 * x * x * x - 3 * x)));
    CHECK(legendre_derivative(2, x) == Approx(3 * x));
    CHECK(legendre_derivative(3, x) == Approx(0.5 * (15 * x * x - 3)));
  }
}

TEST_CASE("P1 on a single triangle is the barycentric basis") {
  const Mesh mesh = single_triangle();
  const PrimalSpace space(mesh, 1, false);
  CHECK(space.dof_count() == 3);
  LocalBasis basis;
  const Vec2 nodes[3] = {{0, 0}, {1, 0}, {0, 1}};
  for (int j = 0; j < 3; ++j) {
    space.evaluate(0, nodes[j], basis);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(basis.values(i) - (i == j ? 1.0 : 0.0)) <= 1e-15);
  }
}

TEST_CASE("annulus (8, 2) dof counts") {
  const Mesh mesh = build_annulus_mesh(8, 2);
  CHECK(mesh.num_edges() == 56);
  CHECK(PrimalSpace(mesh, 2, true).dof_count() == 24 + 56 + 16);
  CHECK(PrimalSpace(mesh, 2, false).dof_count() == 24 + 56);
  CHECK(PrimalSpace(mesh, 3, true).dof_count() == 24 + 2 * 56 + 32 + 16);
  CHECK(MultiplierSpace(mesh, 1).dof_count() == 32);
  const Mesh stair = build_staircase_mesh(16, ellipse_domain());
  CHECK(MultiplierSpace(stair, 0).dof_count() == stair.num_facets());
}

TEST_CASE("unsupported orders") {
  const Mesh tri = single_triangle();
  CHECK_THROWS_AS(PrimalSpace(tri, 4, false), UnsupportedOrder);
  CHECK_THROWS_AS(PrimalSpace(tri, 0, false), UnsupportedOrder);
  const Mesh quad = build_rectangle_quad_mesh(1, 1, {0, 0}, {1, 1});
  CHECK_THROWS_AS(PrimalSpace(quad, 2, false), UnsupportedOrder);
  CHECK_THROWS_AS(MultiplierSpace(tri, -1), UnsupportedOrder);
  CHECK_THROWS_AS(MultiplierSpace(tri, 11), UnsupportedOrder);
}

TEST_CASE("k = 2 bubble trace: closed-form values") {
  double v;
  Vec2 g;
  // Edge 0 of the reference triangle runs from (0,0) to (1,0); s = x.
  edge_bubble(CellKind::triangle, 2, 0, {0.5, 0.0}, v, g);
  CHECK(std::abs(v) <= 1e-16);
  edge_bubble(CellKind::triangle, 2, 0, {0.25, 0.0}, v, g);
  CHECK(v == Approx(-3.0 / 32.0).epsilon(1e-15));
  edge_bubble(CellKind::triangle, 2, 0, {0.0, 0.0}, v, g);
  CHECK(v == 0.0);
  edge_bubble(CellKind::triangle, 2, 0, {1.0, 0.0}, v, g);
  CHECK(v == 0.0);
}

TEST_CASE("property: bubbles vanish at vertices and on the other edges") {
  oracle::Rng rng(17);
  const Vec2 tv[3] = {{0, 0}, {1, 0}, {0, 1}};
  for (int k = 1; k <= 3; ++k)
    for (int e = 0; e < 3; ++e)
      for (int other = 0; other < 3; ++other) {
        if (other == e) continue;
        for (int i = 0; i < 10; ++i) {
          const double s = rng.uniform(0, 1);
          const Vec2 x = tv[other] + s * (tv[(other + 1) % 3] - tv[other]);
          double v;
          Vec2 g;
          edge_bubble(CellKind::triangle, k, e, x, v, g);
          CHECK(std::abs(v) <= 1e-14);
        }
      }
  const Vec2 qv[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i < 4; ++i) {
      double v;
      Vec2 g;
      edge_bubble(CellKind::quad, 1, e, qv[i], v, g);
      CHECK(std::abs(v) <= 1e-14);
    }
    for (int other = 0; other < 4; ++other) {
      if (other == e) continue;
      for (int i = 0; i < 10; ++i) {
        const Vec2 x = qv[other] + rng.uniform(0, 1) * (qv[(other + 1) % 4] - qv[other]);
        double v;
        Vec2 g;
        edge_bubble(CellKind::quad, 1, e, x, v, g);
        CHECK(std::abs(v) <= 1e-14);
      }
    }
    // s(1-s) on the own edge: 1/4 at its midpoint.
    double v;
    Vec2 g;
    edge_bubble(CellKind::quad, 1, e, 0.5 * (qv[e] + qv[(e + 1) % 4]), v, g);
    CHECK(v == Approx(0.25));
  }
}

TEST_CASE("property: partition of unity and nodal interpolation") {
  oracle::Rng rng(23);
  for (int k = 1; k <= 3; ++k) {
    const LagrangeReference ref(CellKind::triangle, k);
    double values[10], grads[20];
    for (int i = 0; i < 100; ++i) {
      ref.evaluate(rng.in_triangle(), values, grads);
      double sum = 0.0, gx = 0.0, gy = 0.0;
      for (int j = 0; j < ref.size(); ++j) sum += values[j], gx += grads[2 * j], gy += grads[2 * j + 1];
      CHECK(std::abs(sum - 1.0) <= 1e-13);
      CHECK(std::abs(gx) <= 1e-12);
      CHECK(std::abs(gy) <= 1e-12);
    }
    for (int n = 0; n < ref.size(); ++n) {
      ref.evaluate(ref.nodes()[n], values, grads);
      for (int j = 0; j < ref.size(); ++j) CHECK(std::abs(values[j] - (j == n ? 1.0 : 0.0)) <= 1e-13);
    }
  }
  const LagrangeReference q1(CellKind::quad, 1);
  double values[10], grads[20];
  for (int i = 0; i < 50; ++i) {
    q1.evaluate({rng.uniform(0, 1), rng.uniform(0, 1)}, values, grads);
    CHECK(std::abs(values[0] + values[1] + values[2] + values[3] - 1.0) <= 1e-13);
  }
}

TEST_CASE("property: physical gradients match finite differences") {
  oracle::Rng rng(29);
  const auto ring = ring_domain();
  const Mesh annulus = build_annulus_mesh(16, 4);
  const Mesh stair = build_staircase_mesh(16, ellipse_domain());
  struct Case {
    const Mesh* mesh;
    int k;
  };
  for (const Case& cs : {Case{&annulus, 1}, Case{&annulus, 2}, Case{&annulus, 3}, Case{&stair, 1}}) {
    const PrimalSpace space(*cs.mesh, cs.k, true);
    LocalBasis basis, plus, minus;
    for (int trial = 0; trial < 30; ++trial) {
      // Boundary cells carry bubbles; pick those half the time.
      int c = rng.integer(0, cs.mesh->num_cells() - 1);
      if (trial % 2 == 0) c = cs.mesh->facet(rng.integer(0, cs.mesh->num_facets() - 1)).cell;
      const Vec2 xi = cs.mesh->kind() == CellKind::triangle
                          ? Vec2(0.1, 0.1) + 0.7 * rng.in_triangle()
                          : Vec2(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9));
      space.evaluate(c, xi, basis);
      const Vec2 x = space.to_physical(c, xi);
      const double step = 1e-6;
      for (int dir = 0; dir < 2; ++dir) {
        Vec2 dx = Vec2::Zero();
        dx(dir) = step;
        space.evaluate(c, space.to_reference(c, x + dx), plus);
        space.evaluate(c, space.to_reference(c, x - dx), minus);
        for (int i = 0; i < basis.values.size(); ++i) {
          const double fd = (plus.values(i) - minus.values(i)) / (2 * step);
          CHECK(std::abs(fd - basis.gradients(i, dir)) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
  }
  (void)ring;
}

TEST_CASE("property: enriched global functions are continuous across interior edges") {
  oracle::Rng rng(31);
  const Mesh annulus = build_annulus_mesh(16, 4);
  const Mesh stair = build_staircase_mesh(16, ellipse_domain());
  for (auto [mesh, k] : {std::pair{&annulus, 1}, std::pair{&annulus, 2}, std::pair{&annulus, 3}, std::pair{&stair, 1}}) {
    const PrimalSpace space(*mesh, k, true);
    Vector coefficients(space.dof_count());
    for (int i = 0; i < coefficients.size(); ++i) coefficients(i) = rng.uniform(-1, 1);
    const PrimalField field(space, coefficients);
    for (int e = 0; e < mesh->num_edges(); ++e) {
      const auto cells = mesh->edge_cells(e);
      if (cells[1] < 0) continue;
      const Vec2 a = mesh->vertex(mesh->edges()[e][0]), b = mesh->vertex(mesh->edges()[e][1]);
      for (int s = 1; s <= 5; ++s) {
        const Vec2 x = a + (s / 6.0) * (b - a);
        const double left = field.value(cells[0], space.to_reference(cells[0], x));
        const double right = field.value(cells[1], space.to_reference(cells[1], x));
        CHECK(std::abs(left - right) <= 1e-12);
      }
    }
  }
}

TEST_CASE("interpolation reproduces polynomials of the space degree") {
  const Mesh mesh = build_annulus_mesh(16, 4);
  oracle::Rng rng(37);
  for (int k = 1; k <= 3; ++k) {
    const PrimalSpace space(mesh, k, true);
    auto poly = [k](const Vec2& x) { return std::pow(x.x() + 0.3, k) - 2.0 * std::pow(x.y(), k) + x.x() * x.y(); };
    if (k == 1) continue;  // x·y is not in P1
    const PrimalField field(space, space.interpolate(poly));
    for (int i = 0; i < 50; ++i) {
      const int c = rng.integer(0, mesh.num_cells() - 1);
      const Vec2 xi = rng.in_triangle();
      CHECK(std::abs(field.value(c, xi) - poly(space.to_physical(c, xi))) <= 1e-12);
    }
    // Lagrange dofs reproduce nodal values.
    for (int i = 0; i < space.lagrange_dof_count(); ++i)
      CHECK(field.coefficients()(i) == poly(space.lagrange_dof_points()[i]));
  }
}

TEST_CASE("multiplier space: facet-local Legendre basis with diagonal mass") {
  const Mesh mesh = build_annulus_mesh(8, 2);
  const MultiplierSpace space(mesh, 3);
  CHECK(space.facet_dof(2, 1) == 2 * 4 + 1);
  std::vector<double> nodes, weights;
  gauss_legendre(6, nodes, weights);
  double psi[16];
  const double length = mesh.facet(0).length;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) {
      double m = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        space.evaluate(nodes[q], psi);
        m += length * weights[q] * psi[i] * psi[j];
      }
      CHECK(std::abs(m - (i == j ? length / (2 * i + 1) : 0.0)) <= 1e-14);
    }
}

TEST_CASE("project_to_multiplier examples") {
  // A single unit facet: the bottom edge of the unit square.
  Mesh unit = build_rectangle_quad_mesh(1, 1, {0, 0}, {1, 1});
  unit.retain_facets([](const BoundaryFacet& f) { return f.normal.y() < -0.5; });
  REQUIRE(unit.num_facets() == 1);
  const double sign = unit.facet(0).endpoints[0] == 0 ? 1.0 : -1.0;  // s runs with x when the facet starts at (0,0)
  REQUIRE(sign == 1.0);

  const MultiplierSpace m0(unit, 0);
  const Vector c0 = project_to_multiplier(m0, [](int, const Vec2&, double s) { return s; });
  CHECK(c0(0) == Approx(0.5).epsilon(1e-14));

  // Best affine fit of s² is s - 1/6 = (1/3) P_0 + (1/2) P_1(2s - 1).
  const MultiplierSpace m1(unit, 1);
  const Vector c1 = project_to_multiplier(m1, [](int, const Vec2&, double s) { return s * s; });
  CHECK(c1(0) == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(c1(1) == Approx(0.5).epsilon(1e-14));

  // Traces already in the space are reproduced on a curved mesh.
  const auto ring = ring_domain();
  const Mesh annulus = precompute_boundary_geometry(build_annulus_mesh(16, 4), ring, 6);
  const MultiplierSpace m2(annulus, 2);
  const Vector c2 = project_to_multiplier(m2, [](int f, const Vec2&, double s) { return f + 2.0 * s - 3.0 * s * s; });
  const MultiplierField field(m2, c2);
  for (int f = 0; f < annulus.num_facets(); ++f)
    for (double s : {0.0, 0.3, 1.0}) CHECK(field.value(f, s) == Approx(f + 2.0 * s - 3.0 * s * s).epsilon(1e-13));
}

TEST_CASE("property: projection residual is orthogonal to the multiplier space") {
  const auto ring = ring_domain();
  const Mesh mesh = precompute_boundary_geometry(build_annulus_mesh(16, 4), ring, 8);
  const MultiplierSpace space(mesh, 1);
  auto trace = [](int, const Vec2& x, double) { return std::sin(5 * x.x()) * std::exp(x.y()); };
  const MultiplierField proj(space, project_to_multiplier(space, trace));
  double psi[16];
  for (int f = 0; f < mesh.num_facets(); ++f) {
    for (int j = 0; j <= 1; ++j) {
      double inner = 0.0, scale = 0.0;
      for (const auto& qp : mesh.facet(f).quad_points) {
        space.evaluate(qp.s, psi);
        const double t = trace(f, qp.point, qp.s);
        inner += qp.weight * (t - proj.value(f, qp.s)) * psi[j];
        scale += qp.weight * std::abs(t * psi[j]);
      }
      CHECK(std::abs(inner) <= 1e-12 * std::max(scale, 1e-300));
    }
  }
}

TEST_CASE("fields validate coefficient lengths") {
  const Mesh mesh = single_triangle();
  const PrimalSpace space(mesh, 1, false);
  CHECK_THROWS_AS(PrimalField(space, Vector::Zero(2)), DimensionMismatch);
  const MultiplierSpace mult(mesh, 0);
  CHECK_THROWS_AS(MultiplierField(mult, Vector::Zero(7)), DimensionMismatch);
}
