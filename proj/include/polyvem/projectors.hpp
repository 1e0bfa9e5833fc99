#pragma once

#include <functional>

#include "polyvem/workspace.hpp"

namespace polyvem {

using ScalarField = std::function<double(const Vector2&)>;
using VectorField = std::function<Vector2(const Vector2&)>;
using TensorField = std::function<Matrix2(const Vector2&)>;

/// Projector matrices of one element. Pbt maps H-space DOFs of one tensor
/// row to its L2-projection coefficients in the vector monomial basis; Rb
/// maps V-space DOFs to energy-projection coefficients in P_{k+1}; PU to
/// L2-projection coefficients in P_k; PGU maps vector V DOFs to the tensor
/// coefficients of the projected gradient. Ha and Hd are the stabilization
/// difference maps (DOFs of the identity minus the projection).
struct ProjectorSet {
  Matrix Di;        // m x nH
  Matrix Pbt;       // 2m x nH
  Matrix Pb;        // 4m x 2nH
  Matrix Rt;        // (m1t-1) x nV
  RowVector eta1;   // 1 x nV
  Matrix Rb;        // m1t x nV
  Matrix PU;        // m x nV
  Matrix PGU;       // 4m x 2nV
  Matrix Ha;        // nH x nH
  Matrix Hd;        // nV x nV
};

Matrix build_div_matrix(const ElementWorkspace& ws);
std::pair<Matrix, Matrix> build_Pb(const ElementWorkspace& ws, const Matrix& Di);
void build_Rb(const ElementWorkspace& ws, Matrix& Rt, RowVector& eta1, Matrix& Rb);
std::pair<Matrix, Matrix> build_PU_PGU(const ElementWorkspace& ws, const Matrix& Rb);

ProjectorSet build_projectors(const ElementWorkspace& ws);

/// DOFs of an analytic tensor field: per row, edge normal moments edge by
/// edge (canonical edge normal and parametrization), then divergence
/// moments, then rot moments; first-row block stacked over the second.
Vector dofs_H(const ElementWorkspace& ws, const TensorField& tau);
/// Same for a single row treated as a vector field (length nH).
Vector dofs_H_row(const ElementWorkspace& ws, const VectorField& tau_row);

/// DOFs of an analytic scalar field: vertex values, k interior edge values
/// per edge counted from the local start vertex, then unscaled moments
/// against the P_{k-1} monomials (length nV).
Vector dofs_V_scalar(const ElementWorkspace& ws, const ScalarField& v);
/// Vector version, first-component block stacked over the second (2 nV).
Vector dofs_V(const ElementWorkspace& ws, const VectorField& v);

}  // namespace polyvem
