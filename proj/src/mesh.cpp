#include "bvc/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bvc/error.hpp"
#include "bvc/quadrature.hpp"

namespace bvc {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells, CellKind kind)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), kind_(kind) {
  const int nv = vertices_per_cell();
  for (int c = 0; c < num_cells(); ++c) {
    for (int i = 0; i < nv; ++i)
      if (cells_[c][i] < 0 || cells_[c][i] >= num_vertices())
        throw std::invalid_argument("Mesh: vertex index out of range in cell " + std::to_string(c));
    if (nv == 3) cells_[c][3] = -1;
    if (cell_area(c) <= 0.0)
      throw std::invalid_argument("Mesh: cell " + std::to_string(c) + " is not counterclockwise");
  }
  build_topology();
}

void Mesh::build_topology() {
  const int nv = vertices_per_cell();
  std::map<std::pair<int, int>, int> index;
  cell_edges_.assign(cells_.size(), {-1, -1, -1, -1});
  for (int c = 0; c < num_cells(); ++c) {
    for (int e = 0; e < nv; ++e) {
      const int a = cells_[c][e];
      const int b = cells_[c][(e + 1) % nv];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = index.try_emplace({key.first, key.second}, num_edges());
      if (inserted) {
        edges_.push_back({key.first, key.second});
        edge_cells_.push_back({c, -1});
      } else {
        auto& owners = edge_cells_[it->second];
        if (owners[1] != -1)
          throw std::invalid_argument("Mesh: edge shared by more than two cells");
        owners[1] = c;
      }
      cell_edges_[c][e] = it->second;
    }
  }

  cell_facets_.assign(cells_.size(), {-1, -1, -1, -1});
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_cells_[e][1] != -1) continue;
    const int c = edge_cells_[e][0];
    int local = 0;
    while (cell_edges_[c][local] != e) ++local;
    BoundaryFacet f;
    f.cell = c;
    f.local_edge = local;
    f.endpoints = {cells_[c][local], cells_[c][(local + 1) % nv]};
    const Vec2 t = vertices_[f.endpoints[1]] - vertices_[f.endpoints[0]];
    f.length = t.norm();
    f.normal = Vec2(t.y(), -t.x()) / f.length;
    cell_facets_[c][local] = num_facets();
    facets_.push_back(std::move(f));
  }
}

double Mesh::h() const { return 1.0 / std::sqrt(static_cast<double>(nno())); }

Mat2 Mesh::cell_jacobian(int c) const {
  const auto& cell = cells_[c];
  const Vec2& v0 = vertices_[cell[0]];
  Mat2 J;
  if (kind_ == CellKind::triangle) {
    J.col(0) = vertices_[cell[1]] - v0;
    J.col(1) = vertices_[cell[2]] - v0;
  } else {
    J.col(0) = vertices_[cell[1]] - v0;
    J.col(1) = vertices_[cell[3]] - v0;
  }
  return J;
}

Vec2 Mesh::cell_centroid(int c) const {
  Vec2 sum = Vec2::Zero();
  for (int i = 0; i < vertices_per_cell(); ++i) sum += vertices_[cells_[c][i]];
  return sum / vertices_per_cell();
}

double Mesh::cell_area(int c) const {
  const auto& cell = cells_[c];
  double area = signed_area(vertices_[cell[0]], vertices_[cell[1]], vertices_[cell[2]]);
  if (kind_ == CellKind::quad)
    area += signed_area(vertices_[cell[0]], vertices_[cell[2]], vertices_[cell[3]]);
  return area;
}

void Mesh::retain_facets(const std::function<bool(const BoundaryFacet&)>& keep) {
  std::vector<BoundaryFacet> kept;
  cell_facets_.assign(cells_.size(), {-1, -1, -1, -1});
  for (auto& f : facets_) {
    if (!keep(f)) continue;
    cell_facets_[f.cell][f.local_edge] = static_cast<int>(kept.size());
    kept.push_back(std::move(f));
  }
  facets_ = std::move(kept);
}

Mesh build_annulus_mesh(int n_theta, int n_r, double inner, double outer) {
  if (n_theta < 8 || n_r < 2)
    throw InvalidResolution("annulus mesh needs n_theta >= 8 and n_r >= 2, got " +
                            std::to_string(n_theta) + ", " + std::to_string(n_r));
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(n_theta) * (n_r + 1));
  for (int j = 0; j <= n_r; ++j) {
    const double r = (j == n_r) ? outer : inner + j * (outer - inner) / n_r;
    for (int i = 0; i < n_theta; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / n_theta;
      vertices.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
  }
  auto v = [n_theta](int i, int j) { return j * n_theta + (i % n_theta); };

  std::vector<Mesh::Cell> cells;
  cells.reserve(2 * static_cast<std::size_t>(n_theta) * n_r);
  for (int j = 0; j < n_r; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      // Counterclockwise quad: radial step first, then angular.
      const int a = v(i, j), b = v(i, j + 1), c = v(i + 1, j + 1), d = v(i + 1, j);
      if ((i + j) % 2 == 0) {
        cells.push_back({a, b, c, -1});
        cells.push_back({a, c, d, -1});
      } else {
        cells.push_back({a, b, d, -1});
        cells.push_back({b, c, d, -1});
      }
    }
  }
  return Mesh(std::move(vertices), std::move(cells), CellKind::triangle);
}

Mesh build_staircase_mesh(int n, const ImplicitDomain& domain) {
  if (n < 8 || n % 2 != 0)
    throw InvalidResolution("staircase mesh needs an even n >= 8, got " + std::to_string(n));
  const int nx = n, ny = n / 2;
  const double side = 4.0 / n;
  auto grid_point = [&](int i, int j) { return Vec2(-2.0 + i * side, -1.0 + j * side); };

  std::vector<char> inside((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) inside[j * (nx + 1) + i] = domain.level_set(grid_point(i, j)) < 0.0;
  auto in = [&](int i, int j) { return inside[j * (nx + 1) + i] != 0; };

  std::vector<int> renumber((nx + 1) * (ny + 1), -1);
  std::vector<Vec2> vertices;
  std::vector<Mesh::Cell> cells;
  auto vertex = [&](int i, int j) {
    int& id = renumber[j * (nx + 1) + i];
    if (id < 0) {
      id = static_cast<int>(vertices.size());
      vertices.push_back(grid_point(i, j));
    }
    return id;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (in(i, j) && in(i + 1, j) && in(i + 1, j + 1) && in(i, j + 1))
        cells.push_back({vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)});
  if (cells.empty()) throw EmptyMesh("staircase mesh: no cell lies inside the domain");
  return Mesh(std::move(vertices), std::move(cells), CellKind::quad);
}

Mesh build_rectangle_tri_mesh(int nx, int ny, Vec2 lower, Vec2 upper) {
  if (nx < 1 || ny < 1) throw InvalidResolution("rectangle mesh needs nx, ny >= 1");
  std::vector<Vec2> vertices;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({lower.x() + (upper.x() - lower.x()) * i / nx,
                          lower.y() + (upper.y() - lower.y()) * j / ny});
  auto v = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Mesh::Cell> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      cells.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1), -1});
      cells.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1), -1});
    }
  return Mesh(std::move(vertices), std::move(cells), CellKind::triangle);
}

Mesh build_rectangle_quad_mesh(int nx, int ny, Vec2 lower, Vec2 upper) {
  if (nx < 1 || ny < 1) throw InvalidResolution("rectangle mesh needs nx, ny >= 1");
  std::vector<Vec2> vertices;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({lower.x() + (upper.x() - lower.x()) * i / nx,
                          lower.y() + (upper.y() - lower.y()) * j / ny});
  auto v = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Mesh::Cell> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) cells.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)});
  return Mesh(std::move(vertices), std::move(cells), CellKind::quad);
}

Mesh precompute_boundary_geometry(Mesh mesh, const ImplicitDomain& domain, int points_per_facet) {
  if (points_per_facet < 2)
    throw std::invalid_argument("precompute_boundary_geometry: need at least 2 points per facet");
  std::vector<double> nodes, weights;
  gauss_legendre(points_per_facet, nodes, weights);
  for (int fi = 0; fi < mesh.num_facets(); ++fi) {
    BoundaryFacet& f = mesh.facets_[fi];
    f.quad_points.clear();
    for (int q = 0; q < points_per_facet; ++q) {
      FacetQuadPoint qp;
      qp.s = nodes[q];
      qp.weight = weights[q] * f.length;
      qp.point = f.point_at(qp.s, mesh.vertices_);
      try {
        qp.rho = ray_distance(domain, qp.point, f.normal);
      } catch (const NoIntersection& e) {
        throw NoIntersection("facet " + std::to_string(fi) + ": " + e.what());
      }
      qp.pullback = qp.point + qp.rho * f.normal;
      f.quad_points.push_back(qp);
    }
  }
  mesh.points_per_facet_ = points_per_facet;
  return mesh;
}

Mesh ladder_mesh(MeshFamily family, int level, const ImplicitDomain& domain) {
  const int scale = 1 << level;
  if (family == MeshFamily::annulus) return build_annulus_mesh(16 * scale, 4 * scale);
  return build_staircase_mesh(16 * scale, domain);
}

std::vector<Mesh> mesh_sequence(MeshFamily family, int levels, const ImplicitDomain& domain) {
  if (levels < 3) throw std::invalid_argument("mesh_sequence: need at least 3 levels");
  std::vector<Mesh> meshes;
  for (int l = 0; l < levels; ++l) meshes.push_back(ladder_mesh(family, l, domain));
  return meshes;
}

std::vector<Mesh> mesh_sequence(MeshFamily family, int levels) {
  return mesh_sequence(family, levels, family == MeshFamily::annulus ? ring_domain() : ellipse_domain());
}

}  // namespace bvc
