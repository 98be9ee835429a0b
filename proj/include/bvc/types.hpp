#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace bvc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Selects between the OpenMP kernels and the serial reference loops. Both
// paths emit contributions in cell/facet order, so their results are
// bit-identical.
enum class ExecPolicy { serial, parallel };

}  // namespace bvc
