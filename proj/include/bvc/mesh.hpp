#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "bvc/geometry.hpp"
#include "bvc/types.hpp"

namespace bvc {

enum class CellKind { triangle, quad };

struct FacetQuadPoint {
  Vec2 point;
  double weight = 0.0;  // physical weight, sums to the facet length
  double s = 0.0;       // facet parameter in [0,1], 0 at endpoints[0]
  double rho = 0.0;     // ρ_h(point)
  Vec2 pullback;        // p_h(point) = point + rho·n_h ∈ ∂Ω
};

struct BoundaryFacet {
  int cell = -1;
  int local_edge = -1;
  std::array<int, 2> endpoints{};  // ordered counterclockwise about `cell`
  Vec2 normal;                     // outward unit normal n_h
  double length = 0.0;
  std::vector<FacetQuadPoint> quad_points;

  Vec2 point_at(double s, const std::vector<Vec2>& vertices) const {
    return (1.0 - s) * vertices[endpoints[0]] + s * vertices[endpoints[1]];
  }
};

/// Conforming mesh of affine triangles or parallelogram quads.
///
/// Cells store vertex indices counterclockwise (quads use slots 0..3,
/// triangles 0..2). Local edge e joins local vertices e and e+1. Boundary
/// facets are the edges owned by a single cell, unless narrowed later with
/// retain_facets().
class Mesh {
 public:
  using Cell = std::array<int, 4>;

  Mesh(std::vector<Vec2> vertices, std::vector<Cell> cells, CellKind kind);

  CellKind kind() const { return kind_; }
  int vertices_per_cell() const { return kind_ == CellKind::triangle ? 3 : 4; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }

  /// Number of vertices of the lowest-order mesh, NNO.
  int nno() const { return num_vertices(); }
  /// Global mesh size 1/sqrt(NNO).
  double h() const;

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int c) const { return cells_[c]; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  int cell_edge(int c, int local_edge) const { return cell_edges_[c][local_edge]; }
  /// Cells adjacent to an edge; the second entry is -1 on the boundary.
  const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }
  const BoundaryFacet& facet(int f) const { return facets_[f]; }
  /// Facet index for (cell, local edge), or -1.
  int cell_facet(int c, int local_edge) const { return cell_facets_[c][local_edge]; }
  bool has_facet_geometry() const { return points_per_facet_ > 0; }
  int points_per_facet() const { return points_per_facet_; }

  /// Affine map of cell c: x = origin + J ξ from the reference cell.
  Vec2 cell_origin(int c) const { return vertices_[cells_[c][0]]; }
  Mat2 cell_jacobian(int c) const;
  Vec2 cell_centroid(int c) const;
  double cell_area(int c) const;

  /// Keep only the facets satisfying `keep`; used for fixtures where part of
  /// the topological boundary is not a Dirichlet boundary.
  void retain_facets(const std::function<bool(const BoundaryFacet&)>& keep);

  /// V - E + F.
  int euler_characteristic() const { return num_vertices() - num_edges() + num_cells(); }

 private:
  friend Mesh precompute_boundary_geometry(Mesh mesh, const ImplicitDomain& domain,
                                           int points_per_facet);
  void build_topology();

  std::vector<Vec2> vertices_;
  std::vector<Cell> cells_;
  CellKind kind_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 4>> cell_edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<BoundaryFacet> facets_;
  std::vector<std::array<int, 4>> cell_facets_;
  int points_per_facet_ = 0;
};

/// Structured polar triangulation of r_in ≤ r ≤ r_out with n_theta angular
/// and n_r radial intervals. Requires n_theta ≥ 8 and n_r ≥ 2.
Mesh build_annulus_mesh(int n_theta, int n_r, double inner = 0.25, double outer = 0.75);

/// Union of the squares (side 4/n) of a uniform grid over [-2,2]×[-1,1]
/// whose four corners lie strictly inside `domain`. Requires even n ≥ 8.
Mesh build_staircase_mesh(int n, const ImplicitDomain& domain);

/// Structured meshes of an axis-aligned rectangle, for fixtures.
Mesh build_rectangle_tri_mesh(int nx, int ny, Vec2 lower, Vec2 upper);
Mesh build_rectangle_quad_mesh(int nx, int ny, Vec2 lower, Vec2 upper);

/// Gauss points (points_per_facet ≥ 2) on every facet, each with ρ_h and
/// p_h from ray casting along n_h. Errors from geometry carry the facet id.
Mesh precompute_boundary_geometry(Mesh mesh, const ImplicitDomain& domain, int points_per_facet);

/// Default Gauss points per facet for degree-k spaces, 2k+2.
inline int default_facet_points(int degree) { return 2 * degree + 2; }

enum class MeshFamily { annulus, staircase };

/// Refinement ladder: annulus (16·2^l, 4·2^l), staircase n = 16·2^l.
std::vector<Mesh> mesh_sequence(MeshFamily family, int levels);
std::vector<Mesh> mesh_sequence(MeshFamily family, int levels, const ImplicitDomain& domain);
/// Single rung of the ladder.
Mesh ladder_mesh(MeshFamily family, int level, const ImplicitDomain& domain);

/// Plain-text export: header "vertices N cells M facets K kind tri|quad",
/// then N vertex lines, M cell lines, K facet lines
/// "cell local_edge a b nx ny". Numbers use 17 significant digits.
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);

}  // namespace bvc
