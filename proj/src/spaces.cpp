#include "bvc/spaces.hpp"

#include <Eigen/LU>
#include <cmath>
#include <string>

#include "bvc/error.hpp"
#include "bvc/quadrature.hpp"

namespace bvc {

namespace {

Vec2 triangle_vertex(int i) {
  static const Vec2 v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  return v[i];
}

Vec2 quad_vertex(int i) {
  static const Vec2 v[4] = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  return v[i];
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

LagrangeReference::LagrangeReference(CellKind kind, int degree) : kind_(kind), degree_(degree) {
  if (kind == CellKind::triangle) {
    if (degree < 1 || degree > 3)
      throw UnsupportedOrder("triangles support P1..P3, got P" + std::to_string(degree));
    for (int i = 0; i < 3; ++i) nodes_.push_back(triangle_vertex(i));
    for (int e = 0; e < 3; ++e) {
      const Vec2 a = triangle_vertex(e), b = triangle_vertex((e + 1) % 3);
      for (int t = 1; t < degree; ++t) nodes_.push_back(a + (b - a) * (static_cast<double>(t) / degree));
    }
    if (degree == 3) nodes_.push_back({1.0 / 3.0, 1.0 / 3.0});
    for (int total = 0; total <= degree; ++total)
      for (int py = 0; py <= total; ++py) exponents_.push_back({total - py, py});
  } else {
    if (degree != 1) throw UnsupportedOrder("quads support Q1 only, got Q" + std::to_string(degree));
    for (int i = 0; i < 4; ++i) nodes_.push_back(quad_vertex(i));
    exponents_ = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  }
  const int n = size();
  DenseMatrix vandermonde(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      vandermonde(i, j) = ipow(nodes_[i].x(), exponents_[j][0]) * ipow(nodes_[i].y(), exponents_[j][1]);
  // V C^T = I, so basis i = sum_j C(i, j) m_j takes value δ_ik at node k.
  coefficients_ = vandermonde.inverse().transpose();
}

void LagrangeReference::evaluate(const Vec2& xi, double* values, double* ref_gradients_xy) const {
  const int n = size();
  double m[10], mx[10], my[10];
  for (int j = 0; j < n; ++j) {
    const int a = exponents_[j][0], b = exponents_[j][1];
    const double xa = ipow(xi.x(), a), yb = ipow(xi.y(), b);
    m[j] = xa * yb;
    mx[j] = a > 0 ? a * ipow(xi.x(), a - 1) * yb : 0.0;
    my[j] = b > 0 ? b * xa * ipow(xi.y(), b - 1) : 0.0;
  }
  for (int i = 0; i < n; ++i) {
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = coefficients_(i, j);
      v += c * m[j];
      gx += c * mx[j];
      gy += c * my[j];
    }
    values[i] = v;
    if (ref_gradients_xy) {
      ref_gradients_xy[2 * i] = gx;
      ref_gradients_xy[2 * i + 1] = gy;
    }
  }
}

void edge_bubble(CellKind kind, int degree, int edge, const Vec2& xi, double& value, Vec2& ref_gradient) {
  if (kind == CellKind::triangle) {
    const double lambda[3] = {1.0 - xi.x() - xi.y(), xi.x(), xi.y()};
    const Vec2 grad[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
    const int a = edge, b = (edge + 1) % 3;
    const double la = lambda[a], lb = lambda[b];
    const double x = lb - la;
    const double p = legendre(degree - 1, x), dp = legendre_derivative(degree - 1, x);
    value = la * lb * p;
    ref_gradient = (lb * p - la * lb * dp) * grad[a] + (la * p + la * lb * dp) * grad[b];
    return;
  }
  double s, t;
  Vec2 ds, dt;
  switch (edge) {
    case 0: s = xi.x(); t = xi.y(); ds = {1, 0}; dt = {0, 1}; break;
    case 1: s = xi.y(); t = 1.0 - xi.x(); ds = {0, 1}; dt = {-1, 0}; break;
    case 2: s = 1.0 - xi.x(); t = 1.0 - xi.y(); ds = {-1, 0}; dt = {0, -1}; break;
    default: s = 1.0 - xi.y(); t = xi.x(); ds = {0, -1}; dt = {1, 0}; break;
  }
  value = s * (1.0 - s) * (1.0 - t);
  ref_gradient = (1.0 - 2.0 * s) * (1.0 - t) * ds - s * (1.0 - s) * dt;
}

PrimalSpace::PrimalSpace(const Mesh& mesh, int degree, bool enrich)
    : mesh_(&mesh), degree_(degree), enriched_(enrich), reference_(mesh.kind(), degree) {
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int nc = mesh.num_cells();
  const int per_edge = degree - 1;
  const int interior = (mesh.kind() == CellKind::triangle && degree == 3) ? 1 : 0;
  lagrange_dofs_ = nv + per_edge * ne + interior * nc;
  dof_count_ = lagrange_dofs_ + (enrich ? mesh.num_facets() : 0);

  dof_points_.assign(lagrange_dofs_, Vec2::Zero());
  inverse_jacobian_t_.resize(nc);
  det_.resize(nc);
  cell_bubble_edges_.resize(nc);
  offsets_.assign(nc + 1, 0);
  const int vpc = mesh.vertices_per_cell();
  for (int c = 0; c < nc; ++c) {
    const Mat2 J = mesh.cell_jacobian(c);
    inverse_jacobian_t_[c] = J.inverse().transpose();
    det_[c] = std::abs(J.determinant());

    const auto& cell = mesh.cell(c);
    for (int i = 0; i < vpc; ++i) {
      cell_dofs_.push_back(cell[i]);
      dof_points_[cell[i]] = mesh.vertex(cell[i]);
    }
    for (int e = 0; e < vpc && per_edge > 0; ++e) {
      const int edge = mesh.cell_edge(c, e);
      const bool forward = cell[e] == mesh.edges()[edge][0];
      for (int t = 0; t < per_edge; ++t) {
        const int global = nv + per_edge * edge + (forward ? t : per_edge - 1 - t);
        cell_dofs_.push_back(global);
        dof_points_[global] = to_physical(c, reference_.nodes()[vpc + e * per_edge + t]);
      }
    }
    if (interior) {
      const int global = nv + per_edge * ne + c;
      cell_dofs_.push_back(global);
      dof_points_[global] = mesh.cell_centroid(c);
    }
    if (enrich) {
      for (int e = 0; e < vpc; ++e) {
        const int f = mesh.cell_facet(c, e);
        if (f < 0) continue;
        cell_bubble_edges_[c].push_back(e);
        cell_dofs_.push_back(lagrange_dofs_ + f);
      }
    }
    offsets_[c + 1] = static_cast<int>(cell_dofs_.size());
    max_cell_dofs_ = std::max(max_cell_dofs_, offsets_[c + 1] - offsets_[c]);
  }
}

Vec2 PrimalSpace::to_reference(int c, const Vec2& x) const {
  return inverse_jacobian_t_[c].transpose() * (x - mesh_->cell_origin(c));
}

Vec2 PrimalSpace::to_physical(int c, const Vec2& xi) const {
  return mesh_->cell_origin(c) + mesh_->cell_jacobian(c) * xi;
}

void PrimalSpace::evaluate(int c, const Vec2& xi, LocalBasis& out) const {
  const int n = offsets_[c + 1] - offsets_[c];
  const int nl = reference_.size();
  out.values.resize(n);
  out.gradients.resize(n, 2);
  double ref_grad[20];
  reference_.evaluate(xi, out.values.data(), ref_grad);
  const Mat2& G = inverse_jacobian_t_[c];
  for (int i = 0; i < nl; ++i) out.gradients.row(i) = (G * Vec2(ref_grad[2 * i], ref_grad[2 * i + 1])).transpose();
  int i = nl;
  for (int e : cell_bubble_edges_[c]) {
    double v;
    Vec2 g;
    edge_bubble(mesh_->kind(), degree_, e, xi, v, g);
    out.values(i) = v;
    out.gradients.row(i) = (G * g).transpose();
    ++i;
  }
}

Vector PrimalSpace::interpolate(const ScalarField& u) const {
  Vector coefficients = Vector::Zero(dof_count_);
  for (int i = 0; i < lagrange_dofs_; ++i) coefficients(i) = u(dof_points_[i]);
  return coefficients;
}

MultiplierSpace::MultiplierSpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
  if (degree < 0 || degree > 10)
    throw UnsupportedOrder("multiplier degree must be in 0..10, got " + std::to_string(degree));
}

void MultiplierSpace::evaluate(double s, double* values) const {
  const double x = 2.0 * s - 1.0;
  for (int j = 0; j <= degree_; ++j) values[j] = legendre(j, x);
}

Vector project_to_multiplier(const MultiplierSpace& space, const FacetTrace& trace, int fallback_points) {
  const Mesh& mesh = space.mesh();
  const int nm = space.dofs_per_facet();
  Vector coefficients = Vector::Zero(space.dof_count());
  std::vector<double> nodes, weights;
  gauss_legendre(fallback_points, nodes, weights);
  std::vector<double> psi(nm);
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const auto& facet = mesh.facet(f);
    auto accumulate = [&](const Vec2& x, double s, double w) {
      space.evaluate(s, psi.data());
      const double value = trace(f, x, s);
      for (int j = 0; j < nm; ++j) coefficients(space.facet_dof(f, j)) += w * value * psi[j];
    };
    if (!facet.quad_points.empty()) {
      for (const auto& qp : facet.quad_points) accumulate(qp.point, qp.s, qp.weight);
    } else {
      for (std::size_t q = 0; q < nodes.size(); ++q)
        accumulate(facet.point_at(nodes[q], mesh.vertices()), nodes[q], weights[q] * facet.length);
    }
    // Legendre mass matrix on the facet: diag(length / (2j + 1)).
    for (int j = 0; j < nm; ++j) coefficients(space.facet_dof(f, j)) *= (2 * j + 1) / facet.length;
  }
  return coefficients;
}

}  // namespace bvc
