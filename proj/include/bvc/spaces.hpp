#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bvc/mesh.hpp"
#include "bvc/types.hpp"

namespace bvc {

/// Basis values and gradients on one cell, ordered like the cell's dofs.
struct LocalBasis {
  Eigen::VectorXd values;
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients;  // physical
};

/// Nodal Lagrange basis on the reference triangle (P1..P3) or square (Q1).
///
/// Node order: vertices, then k-1 nodes per local edge running from local
/// vertex e to e+1, then the interior node (P3 only).
class LagrangeReference {
 public:
  LagrangeReference(CellKind kind, int degree);

  int size() const { return static_cast<int>(nodes_.size()); }
  int degree() const { return degree_; }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  void evaluate(const Vec2& xi, double* values, double* ref_gradients_xy) const;

 private:
  CellKind kind_;
  int degree_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 2>> exponents_;
  DenseMatrix coefficients_;  // row i: monomial coefficients of basis i
};

/// Hierarchical degree k+1 function attached to local edge `edge`.
/// Triangles: λ_a λ_b L_{k-1}(λ_b - λ_a) with a = edge, b = edge + 1.
/// Quads: s(1-s)(1-t), s along the edge from local vertex a, t the
/// normalized distance from the edge.
void edge_bubble(CellKind kind, int degree, int edge, const Vec2& xi, double& value, Vec2& ref_gradient);

/// Continuous P^k / Q1 space, optionally enriched with one bubble per
/// boundary facet. The mesh must outlive the space.
class PrimalSpace {
 public:
  PrimalSpace(const Mesh& mesh, int degree, bool enrich);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  bool enriched() const { return enriched_; }
  int dof_count() const { return dof_count_; }
  int lagrange_dof_count() const { return lagrange_dofs_; }
  const LagrangeReference& reference() const { return reference_; }

  std::span<const int> cell_dofs(int c) const {
    return {cell_dofs_.data() + offsets_[c], static_cast<std::size_t>(offsets_[c + 1] - offsets_[c])};
  }
  int max_cell_dofs() const { return max_cell_dofs_; }
  /// Bubble dof of a boundary facet, or -1 without enrichment.
  int bubble_dof(int facet) const { return enriched_ ? lagrange_dofs_ + facet : -1; }

  Vec2 to_reference(int c, const Vec2& x) const;
  Vec2 to_physical(int c, const Vec2& xi) const;
  /// |det J| of the affine map of cell c.
  double jacobian_determinant(int c) const { return det_[c]; }

  /// Values and physical gradients of the cell's basis at reference point xi.
  void evaluate(int c, const Vec2& xi, LocalBasis& out) const;

  /// Physical position of every Lagrange dof.
  const std::vector<Vec2>& lagrange_dof_points() const { return dof_points_; }
  /// Nodal interpolant; bubble coefficients are zero.
  Vector interpolate(const ScalarField& u) const;

 private:
  const Mesh* mesh_;
  int degree_;
  bool enriched_;
  LagrangeReference reference_;
  int lagrange_dofs_ = 0;
  int dof_count_ = 0;
  int max_cell_dofs_ = 0;
  std::vector<int> offsets_;
  std::vector<int> cell_dofs_;
  std::vector<std::vector<int>> cell_bubble_edges_;
  std::vector<Mat2> inverse_jacobian_t_;
  std::vector<double> det_;
  std::vector<Vec2> dof_points_;
};

/// Facet-wise discontinuous polynomials of degree m; facet f owns dofs
/// f(m+1) .. f(m+1)+m with basis P_j(2s-1).
class MultiplierSpace {
 public:
  MultiplierSpace(const Mesh& mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int dofs_per_facet() const { return degree_ + 1; }
  int dof_count() const { return mesh_->num_facets() * dofs_per_facet(); }
  int facet_dof(int facet, int j) const { return facet * dofs_per_facet() + j; }
  void evaluate(double s, double* values) const;

 private:
  const Mesh* mesh_;
  int degree_;
};

using FacetTrace = std::function<double(int facet, const Vec2& point, double s)>;

/// Facet-wise L² projection onto the multiplier space. Uses the mesh's
/// facet quadrature when present, otherwise a Gauss rule with
/// `fallback_points` points.
Vector project_to_multiplier(const MultiplierSpace& space, const FacetTrace& trace, int fallback_points = 8);

}  // namespace bvc
