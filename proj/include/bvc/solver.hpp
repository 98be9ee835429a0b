#pragma once

#include <vector>

#include "bvc/assembly.hpp"
#include "bvc/field.hpp"

namespace bvc {

enum class Ordering { colamd, rcm, natural };

struct SolverOptions {
  Ordering ordering = Ordering::rcm;
  // A pivot |u_jj| < pivot_tolerance · ‖A‖_∞ flags rank deficiency.
  double pivot_tolerance = 1e-14;
  double residual_tolerance = 1e-10;
};

struct LinearSolve {
  Vector x;
  double relative_residual = 0.0;
  double min_pivot = 0.0;  // smallest |u_jj| of the LU factors
};

/// Direct sparse LU with partial pivoting. Throws SingularSystem on a pivot
/// below the tolerance or when the residual contract cannot be met.
LinearSolve solve_linear(const SparseMatrix& A, const Vector& b, const SolverOptions& options = {});

struct SaddleSolution {
  PrimalField u;
  MultiplierField lambda;
  double relative_residual = 0.0;
};

struct NitscheSolution {
  PrimalField u;
  double relative_residual = 0.0;
};

SaddleSolution solve(const SaddleSystem& system, const PrimalSpace& primal, const MultiplierSpace& multipliers,
                     const SolverOptions& options = {});
NitscheSolution solve(const NitscheSystem& system, const PrimalSpace& primal, const SolverOptions& options = {});

/// Reverse Cuthill-McKee order of the symmetrized pattern of A:
/// order[k] is the unknown placed k-th.
std::vector<int> reverse_cuthill_mckee(const SparseMatrix& A);
/// max |perm(i) - perm(j)| over stored entries, perm the inverse of `order`.
int bandwidth(const SparseMatrix& A, const std::vector<int>& order);

}  // namespace bvc
