#pragma once

#include "polyvem/projectors.hpp"
#include "polyvem/workspace.hpp"

namespace polyvem {

/// Problem data for the augmented pseudostress-velocity scheme.
/// Admissibility: kappa1 > 0, kappa3 > 0, 0 < kappa2 < 2 mu.
struct ProblemParams {
  double mu = 1.0;
  double kappa1 = 0.1;
  double kappa2 = 0.1;
  double kappa3 = 0.1;
  VectorField f;  // volume force
  VectorField g;  // Dirichlet datum on the boundary

  void validate() const;
};

/// 4x4 coefficient matrix of the deviator on the tensor monomial blocks
/// (11,12,21,22); a symmetric projection (Mdev^2 = Mdev).
Matrix deviator_pattern();
/// 4x4 coefficient matrix of tr(.)tr(.) on the tensor blocks.
Matrix trace_pattern();

/// All constant local blocks of one element, ready for global scatter.
struct LocalOperators {
  Matrix Adev, Atr, Adiv, Asta;  // 2nH x 2nH
  Vector atra;                   // 2nH
  Matrix Dgra, Dsta, Dbou;       // 2nV x 2nV
  Matrix B;                      // 2nH x 2nV
  Matrix C;                      // 2nV x 2nH
  Vector b1, b2;                 // 2nH
  Vector b3, b4;                 // 2nV
};

void build_H_operators(const ProjectorSet& ps, const ElementWorkspace& ws,
                       Matrix& Adev, Matrix& Atr, Matrix& Adiv, Matrix& Asta,
                       Vector& atra);
void build_V_operators(const ProjectorSet& ps, const ElementWorkspace& ws,
                       Matrix& Dgra, Matrix& Dsta, Matrix& Dbou);
void build_coupling(const ProjectorSet& ps, const ElementWorkspace& ws,
                    Matrix& B, Matrix& C);
void build_rhs(const ProjectorSet& ps, const ElementWorkspace& ws,
               const ProblemParams& params, Vector& b1, Vector& b2, Vector& b3,
               Vector& b4);

LocalOperators build_local_operators(const ProjectorSet& ps, const ElementWorkspace& ws,
                                     const ProblemParams& params);

/// Coefficients of the L2(e)-orthogonal projection of g onto the edge
/// monomials, one column per component.
Matrix edge_data_projection(const ElementWorkspace& ws, int edge, const VectorField& g);

}  // namespace polyvem
