#pragma once

#include <iosfwd>
#include <string>

#include "bvc/geometry.hpp"
#include "bvc/spaces.hpp"

namespace bvc {

enum class Method { unmodified, bvc, taylor, nitsche };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct AssemblyOptions {
  ExecPolicy policy = ExecPolicy::parallel;
  int stiffness_degree = -1;  // default 2(k+1)
  int load_degree = -1;       // default 2k+3
};

/// Block system
///
///   [ K   Bᵀ ] [u]   [rhs_u]
///   [ B'  -D ] [λ] = [rhs_λ]
///
/// with B' = B_corrected for the Taylor method and B' = B otherwise.
struct SaddleSystem {
  Method method = Method::bvc;
  SparseMatrix K;            // (∇φ_j, ∇φ_i)
  SparseMatrix B;            // (φ_j, ψ_i) on ∂Ω_h
  SparseMatrix D;            // (ρ_h ψ_j, ψ_i); zero for unmodified/taylor
  SparseMatrix B_corrected;  // (φ_j + ρ_h n_h·∇φ_j, ψ_i); taylor only
  Vector rhs_u;              // (f, φ_i)
  Vector rhs_lambda;         // (g∘p_h, ψ_i)

  int primal_size() const { return static_cast<int>(K.rows()); }
  int multiplier_size() const { return static_cast<int>(B.rows()); }
  int size() const { return primal_size() + multiplier_size(); }
  const SparseMatrix& constraint_block() const {
    return method == Method::taylor ? B_corrected : B;
  }
  SparseMatrix matrix() const;
  Vector rhs() const;
};

/// Right-hand side of the corrected Nitsche method. `consistent` carries
/// -(g̃, n_h·∇v), the sign obtained by substituting λ = -n_h·∇u into the
/// multiplier optimality system; `as_printed` uses +(g̃, n_h·∇v).
enum class NitscheDataSign { consistent, as_printed };

struct NitscheOptions {
  AssemblyOptions assembly;
  NitscheDataSign data_sign = NitscheDataSign::consistent;
};

struct NitscheSystem {
  SparseMatrix matrix;
  Vector rhs;
  double gamma0 = 0.0;
  double gamma = 0.0;  // gamma0 / h
};

SaddleSystem assemble_bvc(const PrimalSpace& primal, const MultiplierSpace& multipliers,
                          const ImplicitDomain& domain, const AssemblyOptions& options = {});
SaddleSystem assemble_unmodified(const PrimalSpace& primal, const MultiplierSpace& multipliers,
                                 const ImplicitDomain& domain, const AssemblyOptions& options = {});
SaddleSystem assemble_taylor(const PrimalSpace& primal, const MultiplierSpace& multipliers,
                             const ImplicitDomain& domain, const AssemblyOptions& options = {});
SaddleSystem assemble_saddle(Method method, const PrimalSpace& primal, const MultiplierSpace& multipliers,
                             const ImplicitDomain& domain, const AssemblyOptions& options = {});

NitscheSystem assemble_nitsche(const PrimalSpace& primal, const ImplicitDomain& domain, double gamma0,
                               const NitscheOptions& options = {});

/// Default penalty scale 10 k².
inline double default_gamma0(int degree) { return 10.0 * degree * degree; }

/// Boundary mass matrix (φ_j, φ_i) on ∂Ω_h of the primal space.
SparseMatrix primal_boundary_mass(const PrimalSpace& primal);
/// Facet mass matrix (ψ_j, ψ_i) of the multiplier space.
SparseMatrix multiplier_mass(const MultiplierSpace& multipliers);

/// Coordinate dump, one "i j value" line per stored entry.
void write_coordinate(const SparseMatrix& matrix, std::ostream& out);

}  // namespace bvc
