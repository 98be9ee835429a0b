#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "bvc/error.hpp"
#include "bvc/mesh.hpp"
#include "oracles.hpp"

using namespace bvc;
using doctest::Approx;

namespace {

double signed_area(const Mesh& mesh, int c) {
  const auto& cell = mesh.cell(c);
  double a = 0.0;
  const int n = mesh.vertices_per_cell();
  for (int i = 0; i < n; ++i) {
    const Vec2 p = mesh.vertex(cell[i]), q = mesh.vertex(cell[(i + 1) % n]);
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

void check_topology(const Mesh& mesh) {
  for (int c = 0; c < mesh.num_cells(); ++c) CHECK(signed_area(mesh, c) > 0.0);
  // Edge multiplicity: boundary edges once, interior twice.
  std::map<std::pair<int, int>, int> count;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int n = mesh.vertices_per_cell();
    for (int e = 0; e < n; ++e) {
      int a = mesh.cell(c)[e], b = mesh.cell(c)[(e + 1) % n];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::set<std::pair<int, int>> facet_keys;
  for (const auto& f : mesh.facets())
    facet_keys.insert({std::min(f.endpoints[0], f.endpoints[1]), std::max(f.endpoints[0], f.endpoints[1])});
  int boundary = 0;
  for (const auto& [key, n] : count) {
    CHECK((n == 1 || n == 2));
    if (n == 1) {
      ++boundary;
      CHECK(facet_keys.count(key) == 1);
    }
  }
  CHECK(boundary == mesh.num_facets());
  CHECK(static_cast<int>(count.size()) == mesh.num_edges());
  for (const auto& f : mesh.facets()) {
    const Vec2 a = mesh.vertex(f.endpoints[0]), b = mesh.vertex(f.endpoints[1]);
    CHECK(std::abs(f.normal.norm() - 1.0) <= 1e-14);
    CHECK(std::abs(f.normal.dot(b - a)) <= 1e-14);
    CHECK(f.normal.dot(0.5 * (a + b) - mesh.cell_centroid(f.cell)) > 0.0);
    CHECK(f.length == Approx((b - a).norm()));
  }
  CHECK(mesh.h() == 1.0 / std::sqrt(static_cast<double>(mesh.nno())));
}

}  // namespace

TEST_CASE("annulus (8, 2) counts") {
  const Mesh mesh = build_annulus_mesh(8, 2);
  CHECK(mesh.num_vertices() == 24);
  CHECK(mesh.num_cells() == 32);
  CHECK(mesh.num_facets() == 16);
  CHECK(mesh.euler_characteristic() == 0);
  check_topology(mesh);
}

TEST_CASE("annulus boundary vertices lie on the circles") {
  for (auto [nt, nr] : {std::pair{8, 2}, std::pair{16, 4}, std::pair{40, 7}}) {
    const Mesh mesh = build_annulus_mesh(nt, nr);
    CHECK(mesh.nno() == nt * (nr + 1));
    check_topology(mesh);
    for (const auto& f : mesh.facets())
      for (int v : f.endpoints) {
        const double r = mesh.vertex(v).norm();
        CHECK((std::abs(r - 0.25) <= 1e-14 || std::abs(r - 0.75) <= 1e-14));
      }
  }
}

TEST_CASE("annulus resolution errors") {
  CHECK_THROWS_AS(build_annulus_mesh(7, 2), InvalidResolution);
  CHECK_THROWS_AS(build_annulus_mesh(8, 1), InvalidResolution);
}

TEST_CASE("annulus (64, 16) respects the sagitta bound") {
  const auto ring = ring_domain();
  const Mesh mesh = precompute_boundary_geometry(build_annulus_mesh(64, 16), ring, 6);
  double max_rho = 0.0;
  for (const auto& f : mesh.facets())
    for (const auto& qp : f.quad_points) max_rho = std::max(max_rho, std::abs(qp.rho));
  CHECK(max_rho <= 0.75 * (1.0 - std::cos(std::numbers::pi / 64)) * 1.01);
}

TEST_CASE("facet quadrature data: signs, weights and pullbacks") {
  const auto ring = ring_domain();
  const Mesh mesh = precompute_boundary_geometry(build_annulus_mesh(16, 4), ring, 6);
  CHECK(mesh.has_facet_geometry());
  for (const auto& f : mesh.facets()) {
    double weight = 0.0;
    const bool outer = mesh.vertex(f.endpoints[0]).norm() > 0.5;
    for (const auto& qp : f.quad_points) {
      weight += qp.weight;
      CHECK(std::abs(ring.level_set(qp.pullback)) <= 1e-12);
      CHECK((qp.pullback - (qp.point + qp.rho * f.normal)).norm() <= 1e-15);
      // Outer chords lie inside Ω, inner chords bulge into the hole.
      if (outer)
        CHECK(qp.rho > 0.0);
      else
        CHECK(qp.rho < 0.0);
      const double bound = oracle::sagitta(outer ? 0.75 : 0.25, f.length);
      CHECK(std::abs(qp.rho) <= bound * (1 + 1e-12));
      CHECK(std::abs(qp.rho - oracle::circle_ray_root(qp.point, f.normal, outer ? 0.75 : 0.25)) <= 1e-12);
    }
    CHECK(weight == Approx(f.length).epsilon(1e-14));
  }
}

TEST_CASE("facet geometry errors carry the facet id") {
  // A mesh far larger than the domain's trusted tube.
  const Mesh mesh = build_rectangle_tri_mesh(2, 2, {-3, -3}, {3, 3});
  try {
    (void)precompute_boundary_geometry(mesh, unit_circle_domain(), 3);
    FAIL("expected NoIntersection");
  } catch (const NoIntersection& e) {
    CHECK(std::string(e.what()).find("facet ") == 0);
  }
  CHECK_THROWS_AS(precompute_boundary_geometry(build_annulus_mesh(8, 2), ring_domain(), 1), std::invalid_argument);
}

TEST_CASE("staircase mesh construction") {
  const auto ellipse = ellipse_domain();
  for (int n : {8, 16, 32}) {
    const Mesh mesh = build_staircase_mesh(n, ellipse);
    check_topology(mesh);
    CHECK(mesh.euler_characteristic() == 1);
    for (const auto& cell : mesh.cells())
      for (int i = 0; i < 4; ++i) CHECK(ellipse.level_set(mesh.vertex(cell[i])) < 0.0);
    for (const auto& f : mesh.facets()) {
      const bool axis = (std::abs(std::abs(f.normal.x()) - 1) < 1e-15 && f.normal.y() == 0) ||
                        (std::abs(std::abs(f.normal.y()) - 1) < 1e-15 && f.normal.x() == 0);
      CHECK(axis);
    }
    // Independent count of the grid squares with four interior corners.
    const double side = 4.0 / n;
    int expected = 0;
    for (int j = 0; j < n / 2; ++j)
      for (int i = 0; i < n; ++i) {
        bool all = true;
        for (int di = 0; di <= 1; ++di)
          for (int dj = 0; dj <= 1; ++dj) {
            const double x = -2 + (i + di) * side, y = -1 + (j + dj) * side;
            all = all && x * x / 4 + y * y < 1;
          }
        expected += all;
      }
    CHECK(mesh.num_cells() == expected);
  }
}

// Axis rays leaving facets where the ellipse is nearly parallel to them travel
// O(sqrt(cell)) before hitting the boundary, so the bound is in sqrt(cell).
TEST_CASE("staircase at n = 32: ρ_h positive and O(sqrt(cell))") {
  const auto ellipse = ellipse_domain();
  const Mesh mesh = precompute_boundary_geometry(build_staircase_mesh(32, ellipse), ellipse, 4);
  double max_rho = 0.0;
  for (const auto& f : mesh.facets())
    for (const auto& qp : f.quad_points) {
      CHECK(qp.rho > 0.0);
      CHECK(std::abs(qp.rho - oracle::ellipse_ray_root(qp.point, f.normal)) <= 1e-10);
      max_rho = std::max(max_rho, qp.rho);
    }
  CHECK(max_rho > 2.0 * 4.0 / 32);
  CHECK(max_rho <= 2.0 * std::sqrt(4.0 / 32));
}

TEST_CASE("staircase errors") {
  const auto ellipse = ellipse_domain();
  CHECK_THROWS_AS(build_staircase_mesh(6, ellipse), InvalidResolution);
  CHECK_THROWS_AS(build_staircase_mesh(9, ellipse), InvalidResolution);
  ImplicitDomain tiny = unit_circle_domain();
  tiny.level_set = [](const Vec2& x) { return x.squaredNorm() - 0.01; };
  CHECK_THROWS_AS(build_staircase_mesh(8, tiny), EmptyMesh);
}

TEST_CASE("mesh ladder") {
  const auto annulus = mesh_sequence(MeshFamily::annulus, 3);
  REQUIRE(annulus.size() == 3);
  CHECK(annulus[0].nno() == 80);
  CHECK(annulus[1].nno() == 288);
  CHECK(annulus[2].nno() == 1088);
  for (std::size_t i = 1; i < annulus.size(); ++i) {
    const double ratio = annulus[i - 1].h() / annulus[i].h();
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.1);
  }
  const auto staircase = mesh_sequence(MeshFamily::staircase, 3);
  CHECK(staircase[0].num_cells() == build_staircase_mesh(16, ellipse_domain()).num_cells());
  for (std::size_t i = 1; i < staircase.size(); ++i) CHECK(staircase[i].h() < staircase[i - 1].h());
  CHECK_THROWS_AS(mesh_sequence(MeshFamily::annulus, 2), std::invalid_argument);
}

TEST_CASE("property: annulus perimeter converges from below") {
  const double exact = 2.0 * std::numbers::pi * (0.25 + 0.75);
  double previous = 0.0;
  for (const auto& mesh : mesh_sequence(MeshFamily::annulus, 4)) {
    double perimeter = 0.0;
    for (const auto& f : mesh.facets()) perimeter += f.length;
    CHECK(perimeter <= exact);
    CHECK(perimeter > previous);
    previous = perimeter;
  }
  CHECK(previous == Approx(exact).epsilon(1e-3));
}

TEST_CASE("property: δ_h/h² stable on annuli, δ_h/sqrt(cell) stable on staircases") {
  std::vector<double> ratios;
  const auto ring = ring_domain();
  for (int l = 0; l < 4; ++l) {
    const Mesh mesh = precompute_boundary_geometry(ladder_mesh(MeshFamily::annulus, l, ring), ring, 4);
    double delta = 0.0;
    for (const auto& f : mesh.facets())
      for (const auto& qp : f.quad_points) delta = std::max(delta, std::abs(qp.rho));
    ratios.push_back(delta / (mesh.h() * mesh.h()));
  }
  for (double r : ratios) CHECK(r == Approx(ratios.back()).epsilon(0.25));
  const auto ellipse = ellipse_domain();
  for (int l = 0; l < 3; ++l) {
    const Mesh mesh = precompute_boundary_geometry(ladder_mesh(MeshFamily::staircase, l, ellipse), ellipse, 3);
    double delta = 0.0;
    for (const auto& f : mesh.facets())
      for (const auto& qp : f.quad_points) delta = std::max(delta, qp.rho);
    const double cell = 4.0 / (16 << l);
    CHECK(delta / std::sqrt(cell) >= 0.5);
    CHECK(delta / std::sqrt(cell) <= 2.5);
  }
}

TEST_CASE("constructor rejects clockwise cells and bad indices") {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(Mesh(v, {{0, 2, 1, -1}}, CellKind::triangle), std::invalid_argument);
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 5, -1}}, CellKind::triangle), std::invalid_argument);
}

TEST_CASE("retain_facets narrows the boundary") {
  Mesh mesh = build_rectangle_quad_mesh(2, 2, {0, 0}, {1, 1});
  CHECK(mesh.num_facets() == 8);
  mesh.retain_facets([](const BoundaryFacet& f) { return f.normal.y() < -0.5; });
  CHECK(mesh.num_facets() == 2);
  int found = 0;
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int e = 0; e < 4; ++e)
      if (mesh.cell_facet(c, e) >= 0) ++found;
  CHECK(found == 2);
}

TEST_CASE("mesh text format round trip") {
  const Mesh mesh = build_annulus_mesh(16, 4);
  std::stringstream buffer;
  write_mesh(mesh, buffer);
  const std::string text = buffer.str();
  CHECK(text.rfind("vertices 80 cells 128 facets 32 kind tri", 0) == 0);
  const Mesh back = read_mesh(buffer);
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) CHECK(back.vertex(i) == mesh.vertex(i));
  CHECK(back.cells() == mesh.cells());
  REQUIRE(back.num_facets() == mesh.num_facets());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    CHECK(back.facet(f).endpoints == mesh.facet(f).endpoints);
    CHECK(back.facet(f).normal == mesh.facet(f).normal);
  }
  std::stringstream bad("vertices 3 cells 1\n");
  CHECK_THROWS_AS(read_mesh(bad), IoError);
}
