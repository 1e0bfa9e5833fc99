#pragma once

#include "polyvem/projectors.hpp"
#include "polyvem/workspace.hpp"

namespace polyvem {

/// Convection blocks of one element for the current velocity iterate.
struct ConvectionBlocks {
  Matrix Mz1, Mz2;  // m x m weighted mass matrices
  Matrix MdPU;      // 4m x 2nV
  Matrix G1;        // 2nH x 2nV
  Matrix G2;        // 2nV x 2nV
  Matrix DG1;       // 2nH x 2nV
  Matrix DG2;       // 2nV x 2nV
};

/// Monomial coefficients gamma (length 2m) of the projected local velocity
/// z = P_k(u_h|K) from the local V DOFs beta (length 2nV).
Vector projected_velocity_coeffs(const Matrix& PU, const Vector& beta);

/// M_z^l[i][j] = sum_r gamma_{l,r} int_K phi_r phi_i phi_j, by exponent
/// addition from the cached monomial integral table.
std::pair<Matrix, Matrix> build_weighted_mass(const SpaceDims& dims, const Vector& mono,
                                              const Vector& gamma);
inline std::pair<Matrix, Matrix> build_weighted_mass(const ElementWorkspace& ws,
                                                     const Vector& gamma) {
  return build_weighted_mass(ws.dims, ws.mono, gamma);
}

/// The two 4x2 Kronecker column patterns of M_dPU (the coefficient layout
/// of dev(P_k(psi) tensor z) on the tensor monomial blocks).
Matrix mdpu_pattern_1();
Matrix mdpu_pattern_2();

Matrix build_mdpu(const Matrix& Mz1, const Matrix& Mz2, const Matrix& PU);

/// I_{4m} + Kron(transpose pattern, I_m): maps tensor coefficients of T to
/// those of T + T^t.
Matrix symmetrizer(int m);

ConvectionBlocks build_convection(const ProjectorSet& ps, const ElementWorkspace& ws,
                                  const Matrix& Mz1, const Matrix& Mz2, double kappa2);

}  // namespace polyvem
