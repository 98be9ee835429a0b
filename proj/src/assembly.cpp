#include "bvc/assembly.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

#include "bvc/error.hpp"
#include "bvc/parallel.hpp"
#include "bvc/quadrature.hpp"

namespace bvc {

std::string to_string(Method method) {
  switch (method) {
    case Method::unmodified: return "unmodified";
    case Method::bvc: return "bvc";
    case Method::taylor: return "taylor";
    case Method::nitsche: return "nitsche";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "unmodified") return Method::unmodified;
  if (name == "bvc") return Method::bvc;
  if (name == "taylor") return Method::taylor;
  if (name == "nitsche") return Method::nitsche;
  throw ConfigError("unknown method '" + name + "'");
}

namespace {

QuadratureDomain cell_domain(const Mesh& mesh) {
  return mesh.kind() == CellKind::triangle ? QuadratureDomain::triangle : QuadratureDomain::quad;
}

struct CellLocal {
  LocalBasis basis;
  DenseMatrix stiffness;
  Vector load;
};

struct FacetLocal {
  LocalBasis basis;
  DenseMatrix coupling;   // ψ × φ
  DenseMatrix corrected;  // ψ × (φ + ρ ∂_n φ)
  DenseMatrix rho_mass;   // ψ × ψ weighted by ρ
  Vector data;            // (g̃, ψ)
};

struct NitscheFacetLocal {
  LocalBasis basis;
  DenseMatrix matrix;
  Vector rhs;
};

void check_geometry(const PrimalSpace& primal) {
  if (!primal.mesh().has_facet_geometry())
    throw std::invalid_argument("assembly: facet geometry has not been precomputed");
}

void add_block(std::vector<Triplet>& triplets, std::span<const int> rows, std::span<const int> cols,
               const DenseMatrix& block, int row_offset = 0, int col_offset = 0) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      triplets.emplace_back(rows[i] + row_offset, cols[j] + col_offset, block(i, j));
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// Volume terms (∇φ_j, ∇φ_i) and (f, φ_i), shared by every method.
void assemble_volume(const PrimalSpace& primal, const ImplicitDomain& domain, const AssemblyOptions& options,
                     SparseMatrix& K, Vector& load) {
  const Mesh& mesh = primal.mesh();
  const int k = primal.degree();
  const QuadratureRule stiffness_rule =
      quadrature(cell_domain(mesh), options.stiffness_degree >= 0 ? options.stiffness_degree : 2 * (k + 1));
  const QuadratureRule load_rule =
      quadrature(cell_domain(mesh), options.load_degree >= 0 ? options.load_degree : 2 * k + 3);

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_cells()) * primal.max_cell_dofs() * primal.max_cell_dofs());
  load = Vector::Zero(primal.dof_count());

  auto compute = [&](int c, CellLocal& local) {
    const int n = static_cast<int>(primal.cell_dofs(c).size());
    local.stiffness.setZero(n, n);
    local.load.setZero(n);
    const double det = primal.jacobian_determinant(c);
    for (std::size_t q = 0; q < stiffness_rule.size(); ++q) {
      primal.evaluate(c, stiffness_rule.points[q], local.basis);
      local.stiffness.noalias() +=
          (stiffness_rule.weights[q] * det) * local.basis.gradients * local.basis.gradients.transpose();
    }
    for (std::size_t q = 0; q < load_rule.size(); ++q) {
      primal.evaluate(c, load_rule.points[q], local.basis);
      const Vec2 x = primal.to_physical(c, load_rule.points[q]);
      local.load += (load_rule.weights[q] * det * domain.f_rhs(x)) * local.basis.values;
    }
  };
  auto emit = [&](int c, const CellLocal& local) {
    const auto dofs = primal.cell_dofs(c);
    add_block(triplets, dofs, dofs, local.stiffness);
    for (std::size_t i = 0; i < dofs.size(); ++i) load(dofs[i]) += local.load(i);
  };
  for_each_local<CellLocal>(mesh.num_cells(), options.policy, compute, emit);
  K = from_triplets(primal.dof_count(), primal.dof_count(), triplets);
}

}  // namespace

SparseMatrix SaddleSystem::matrix() const {
  const int n = primal_size();
  std::vector<Triplet> triplets;
  triplets.reserve(K.nonZeros() + 2 * B.nonZeros() + D.nonZeros());
  for (int j = 0; j < K.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(K, j); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
  for (int j = 0; j < B.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(B, j); it; ++it) triplets.emplace_back(it.col(), n + it.row(), it.value());
  const SparseMatrix& C = constraint_block();
  for (int j = 0; j < C.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(C, j); it; ++it) triplets.emplace_back(n + it.row(), it.col(), it.value());
  for (int j = 0; j < D.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(D, j); it; ++it)
      triplets.emplace_back(n + it.row(), n + it.col(), -it.value());
  return from_triplets(size(), size(), triplets);
}

Vector SaddleSystem::rhs() const {
  Vector b(size());
  b << rhs_u, rhs_lambda;
  return b;
}

SaddleSystem assemble_saddle(Method method, const PrimalSpace& primal, const MultiplierSpace& multipliers,
                             const ImplicitDomain& domain, const AssemblyOptions& options) {
  if (method == Method::nitsche)
    throw std::invalid_argument("assemble_saddle: Nitsche has no multiplier block");
  if (&primal.mesh() != &multipliers.mesh())
    throw DimensionMismatch("assembly: primal and multiplier spaces live on different meshes");
  check_geometry(primal);
  const Mesh& mesh = primal.mesh();

  SaddleSystem system;
  system.method = method;
  assemble_volume(primal, domain, options, system.K, system.rhs_u);

  const int nm = multipliers.dofs_per_facet();
  const bool with_rho_mass = method == Method::bvc;
  const bool with_correction = method == Method::taylor;
  std::vector<Triplet> coupling, corrected, rho_mass;
  system.rhs_lambda = Vector::Zero(multipliers.dof_count());

  auto compute = [&](int f, FacetLocal& local) {
    const BoundaryFacet& facet = mesh.facet(f);
    const int n = static_cast<int>(primal.cell_dofs(facet.cell).size());
    local.coupling.setZero(nm, n);
    local.corrected.setZero(with_correction ? nm : 0, n);
    local.rho_mass.setZero(nm, nm);
    local.data.setZero(nm);
    double psi_buffer[16];
    for (const FacetQuadPoint& qp : facet.quad_points) {
      primal.evaluate(facet.cell, primal.to_reference(facet.cell, qp.point), local.basis);
      multipliers.evaluate(qp.s, psi_buffer);
      const Eigen::Map<const Vector> psi(psi_buffer, nm);
      local.coupling.noalias() += qp.weight * psi * local.basis.values.transpose();
      if (with_correction) {
        const Vector corrected_trace = local.basis.values + qp.rho * (local.basis.gradients * facet.normal);
        local.corrected.noalias() += qp.weight * psi * corrected_trace.transpose();
      }
      local.rho_mass.noalias() += (qp.weight * qp.rho) * psi * psi.transpose();
      local.data += (qp.weight * domain.g_dirichlet(qp.pullback)) * psi;
    }
  };
  auto emit = [&](int f, const FacetLocal& local) {
    const auto dofs = primal.cell_dofs(mesh.facet(f).cell);
    int rows[16];
    for (int j = 0; j < nm; ++j) rows[j] = multipliers.facet_dof(f, j);
    const std::span<const int> mult(rows, nm);
    add_block(coupling, mult, dofs, local.coupling);
    if (with_correction) add_block(corrected, mult, dofs, local.corrected);
    if (with_rho_mass) add_block(rho_mass, mult, mult, local.rho_mass);
    for (int j = 0; j < nm; ++j) system.rhs_lambda(rows[j]) += local.data(j);
  };
  for_each_local<FacetLocal>(mesh.num_facets(), options.policy, compute, emit);

  const int nl = multipliers.dof_count(), nu = primal.dof_count();
  system.B = from_triplets(nl, nu, coupling);
  system.D = from_triplets(nl, nl, rho_mass);
  if (with_correction) system.B_corrected = from_triplets(nl, nu, corrected);
  return system;
}

SaddleSystem assemble_bvc(const PrimalSpace& primal, const MultiplierSpace& multipliers,
                          const ImplicitDomain& domain, const AssemblyOptions& options) {
  return assemble_saddle(Method::bvc, primal, multipliers, domain, options);
}

SaddleSystem assemble_unmodified(const PrimalSpace& primal, const MultiplierSpace& multipliers,
                                 const ImplicitDomain& domain, const AssemblyOptions& options) {
  return assemble_saddle(Method::unmodified, primal, multipliers, domain, options);
}

SaddleSystem assemble_taylor(const PrimalSpace& primal, const MultiplierSpace& multipliers,
                             const ImplicitDomain& domain, const AssemblyOptions& options) {
  return assemble_saddle(Method::taylor, primal, multipliers, domain, options);
}

NitscheSystem assemble_nitsche(const PrimalSpace& primal, const ImplicitDomain& domain, double gamma0,
                               const NitscheOptions& options) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("assemble_nitsche: gamma0 must be positive");
  check_geometry(primal);
  const Mesh& mesh = primal.mesh();

  NitscheSystem system;
  system.gamma0 = gamma0;
  system.gamma = gamma0 / mesh.h();
  SparseMatrix K;
  assemble_volume(primal, domain, options.assembly, K, system.rhs);

  const double gamma = system.gamma;
  const double data_sign = options.data_sign == NitscheDataSign::consistent ? -1.0 : 1.0;
  std::vector<Triplet> triplets;

  auto compute = [&](int f, NitscheFacetLocal& local) {
    const BoundaryFacet& facet = mesh.facet(f);
    const int n = static_cast<int>(primal.cell_dofs(facet.cell).size());
    local.matrix.setZero(n, n);
    local.rhs.setZero(n);
    for (const FacetQuadPoint& qp : facet.quad_points) {
      primal.evaluate(facet.cell, primal.to_reference(facet.cell, qp.point), local.basis);
      const Vector& phi = local.basis.values;
      const Vector dn = local.basis.gradients * facet.normal;
      const Vector shifted = phi + qp.rho * dn;
      const double w = qp.weight;
      // -(∂_n w, v + ρ∂_n v) - (w + ρ∂_n w, ∂_n v) + (ρ ∂_n w, ∂_n v)
      //   + γ (w + ρ∂_n w, v + ρ∂_n v)
      local.matrix.noalias() -= w * (shifted * dn.transpose() + dn * shifted.transpose());
      local.matrix.noalias() += (w * qp.rho) * dn * dn.transpose();
      local.matrix.noalias() += (w * gamma) * shifted * shifted.transpose();
      const double g = domain.g_dirichlet(qp.pullback);
      local.rhs += (w * g * data_sign) * dn + (w * gamma * g) * shifted;
    }
  };
  auto emit = [&](int f, const NitscheFacetLocal& local) {
    const auto dofs = primal.cell_dofs(mesh.facet(f).cell);
    add_block(triplets, dofs, dofs, local.matrix);
    for (std::size_t i = 0; i < dofs.size(); ++i) system.rhs(dofs[i]) += local.rhs(i);
  };
  for_each_local<NitscheFacetLocal>(mesh.num_facets(), options.assembly.policy, compute, emit);

  system.matrix = K + from_triplets(primal.dof_count(), primal.dof_count(), triplets);
  return system;
}

SparseMatrix primal_boundary_mass(const PrimalSpace& primal) {
  check_geometry(primal);
  const Mesh& mesh = primal.mesh();
  std::vector<Triplet> triplets;
  LocalBasis basis;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const BoundaryFacet& facet = mesh.facet(f);
    const auto dofs = primal.cell_dofs(facet.cell);
    DenseMatrix local = DenseMatrix::Zero(dofs.size(), dofs.size());
    for (const FacetQuadPoint& qp : facet.quad_points) {
      primal.evaluate(facet.cell, primal.to_reference(facet.cell, qp.point), basis);
      local.noalias() += qp.weight * basis.values * basis.values.transpose();
    }
    add_block(triplets, dofs, dofs, local);
  }
  return from_triplets(primal.dof_count(), primal.dof_count(), triplets);
}

SparseMatrix multiplier_mass(const MultiplierSpace& multipliers) {
  const Mesh& mesh = multipliers.mesh();
  const int nm = multipliers.dofs_per_facet();
  std::vector<Triplet> triplets;
  std::vector<double> nodes, weights;
  gauss_legendre(nm + 1, nodes, weights);
  double psi[16];
  for (int f = 0; f < mesh.num_facets(); ++f) {
    DenseMatrix local = DenseMatrix::Zero(nm, nm);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      multipliers.evaluate(nodes[q], psi);
      const Eigen::Map<const Vector> p(psi, nm);
      local.noalias() += weights[q] * mesh.facet(f).length * p * p.transpose();
    }
    int rows[16];
    for (int j = 0; j < nm; ++j) rows[j] = multipliers.facet_dof(f, j);
    add_block(triplets, std::span<const int>(rows, nm), std::span<const int>(rows, nm), local);
  }
  return from_triplets(multipliers.dof_count(), multipliers.dof_count(), triplets);
}

void write_coordinate(const SparseMatrix& matrix, std::ostream& out) {
  char buf[32];
  for (int j = 0; j < matrix.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(matrix, j); it; ++it) {
      auto res = std::to_chars(buf, buf + sizeof(buf), it.value(), std::chars_format::general, 17);
      out << it.row() << " " << it.col() << " " << std::string_view(buf, res.ptr - buf) << "\n";
    }
  if (!out) throw IoError("write_coordinate: stream failure");
}

}  // namespace bvc
