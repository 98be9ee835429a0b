#include "bvc/solver.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "bvc/error.hpp"

namespace bvc {

namespace {

std::string sci(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3e", value);
  return buffer;
}

template <typename StorageIndex>
class RcmOrdering {
 public:
  using PermutationType = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, StorageIndex>;

  template <typename MatrixType>
  void operator()(const MatrixType& mat, PermutationType& perm) {
    const SparseMatrix A = mat;
    const std::vector<int> order = reverse_cuthill_mckee(A);
    perm.resize(static_cast<Eigen::Index>(order.size()));
    for (std::size_t k = 0; k < order.size(); ++k) perm.indices()(order[k]) = static_cast<StorageIndex>(k);
  }
};

// Exposes the supernodal factor so the U diagonal can be inspected.
template <typename OrderingType>
class InspectableLU : public Eigen::SparseLU<SparseMatrix, OrderingType> {
  using Base = Eigen::SparseLU<SparseMatrix, OrderingType>;

 public:
  // Smallest |u_jj| and the original column that owns it.
  std::pair<double, long> smallest_pivot() const {
    double smallest = std::numeric_limits<double>::infinity();
    long column = -1;
    for (Eigen::Index j = 0; j < this->cols(); ++j) {
      for (typename Base::SCMatrix::InnerIterator it(this->m_Lstore, j); it; ++it) {
        if (it.row() == j) {
          if (std::abs(it.value()) < smallest) {
            smallest = std::abs(it.value());
            column = j;
          }
          break;
        }
      }
    }
    if (column >= 0) {
      const auto& indices = this->m_perm_c.indices();
      for (Eigen::Index i = 0; i < indices.size(); ++i)
        if (indices(i) == column) return {smallest, static_cast<long>(i)};
    }
    return {smallest, column};
  }
};

double infinity_norm(const SparseMatrix& A) {
  Vector row_sums = Vector::Zero(A.rows());
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) row_sums(it.row()) += std::abs(it.value());
  return A.rows() > 0 ? row_sums.maxCoeff() : 0.0;
}

template <typename OrderingType>
LinearSolve factor_and_solve(const SparseMatrix& A, const Vector& b, const SolverOptions& options) {
  InspectableLU<OrderingType> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("LU factorization failed: " + lu.lastErrorMessage(), -1, 0.0);

  const auto [pivot, dof] = lu.smallest_pivot();
  const double scale = infinity_norm(A);
  if (pivot < options.pivot_tolerance * scale)
    throw SingularSystem("rank-deficient system: pivot " + sci(pivot) + " at unknown " +
                             std::to_string(dof),
                         dof, pivot);

  LinearSolve result;
  result.min_pivot = pivot;
  result.x = lu.solve(b);
  const double b_norm = std::max(b.norm(), 1e-30);
  result.relative_residual = (A * result.x - b).norm() / b_norm;
  // Iterative refinement with the same factors.
  for (int it = 0; it < 3 && result.relative_residual > options.residual_tolerance; ++it) {
    const Vector r = b - A * result.x;
    result.x += lu.solve(r);
    result.relative_residual = (A * result.x - b).norm() / b_norm;
  }
  if (!std::isfinite(result.relative_residual) || result.relative_residual > options.residual_tolerance)
    throw SingularSystem("residual contract violated: relative residual " + sci(result.relative_residual),
                         dof, pivot);
  return result;
}

}  // namespace

LinearSolve solve_linear(const SparseMatrix& A, const Vector& b, const SolverOptions& options) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw DimensionMismatch("solve_linear: matrix is " + std::to_string(A.rows()) + "x" +
                            std::to_string(A.cols()) + ", rhs has " + std::to_string(b.size()) + " entries");
  if (b.isZero(0.0)) {
    LinearSolve zero;
    zero.x = Vector::Zero(b.size());
    return zero;
  }
  SparseMatrix compressed = A;
  compressed.makeCompressed();
  switch (options.ordering) {
    case Ordering::rcm: return factor_and_solve<RcmOrdering<int>>(compressed, b, options);
    case Ordering::natural: return factor_and_solve<Eigen::NaturalOrdering<int>>(compressed, b, options);
    case Ordering::colamd: break;
  }
  return factor_and_solve<Eigen::COLAMDOrdering<int>>(compressed, b, options);
}

SaddleSolution solve(const SaddleSystem& system, const PrimalSpace& primal, const MultiplierSpace& multipliers,
                     const SolverOptions& options) {
  if (system.primal_size() != primal.dof_count() || system.multiplier_size() != multipliers.dof_count())
    throw DimensionMismatch("solve: system does not match the spaces");
  const LinearSolve s = solve_linear(system.matrix(), system.rhs(), options);
  return {PrimalField(primal, s.x.head(system.primal_size())),
          MultiplierField(multipliers, s.x.tail(system.multiplier_size())), s.relative_residual};
}

NitscheSolution solve(const NitscheSystem& system, const PrimalSpace& primal, const SolverOptions& options) {
  if (system.matrix.rows() != primal.dof_count()) throw DimensionMismatch("solve: system does not match the space");
  const LinearSolve s = solve_linear(system.matrix, system.rhs, options);
  return {PrimalField(primal, s.x), s.relative_residual};
}

std::vector<int> reverse_cuthill_mckee(const SparseMatrix& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<std::vector<int>> adjacency(n);
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (r == c) continue;
      adjacency[r].push_back(c);
      adjacency[c].push_back(r);
    }
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = static_cast<int>(adjacency[i].size());

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<int> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(), [&](int a, int b) { return degree[a] < degree[b]; });
  for (int start : by_degree) {
    if (visited[start]) continue;
    std::deque<int> queue{start};
    visited[start] = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      std::vector<int> next;
      for (int w : adjacency[v])
        if (!visited[w]) {
          visited[w] = 1;
          next.push_back(w);
        }
      std::stable_sort(next.begin(), next.end(), [&](int a, int b) { return degree[a] < degree[b]; });
      queue.insert(queue.end(), next.begin(), next.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

int bandwidth(const SparseMatrix& A, const std::vector<int>& order) {
  std::vector<int> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = static_cast<int>(k);
  int band = 0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(A, j); it; ++it)
      band = std::max(band, std::abs(position[it.row()] - position[it.col()]));
  return band;
}

}  // namespace bvc
