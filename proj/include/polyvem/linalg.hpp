#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace polyvem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;
using IndexVector = Eigen::VectorXi;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Dense Kronecker product kron(A,B), block (i,j) = a_ij * B.
inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

/// kron(I_n, B) without forming the identity.
inline Matrix kron_identity(int n, const Matrix& B) {
  Matrix K = Matrix::Zero(n * B.rows(), n * B.cols());
  for (int i = 0; i < n; ++i)
    K.block(i * B.rows(), i * B.cols(), B.rows(), B.cols()) = B;
  return K;
}

}  // namespace polyvem
