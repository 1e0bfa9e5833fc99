#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "polyvem/basis.hpp"
#include "polyvem/linalg.hpp"
#include "polyvem/mesh.hpp"

namespace polyvem {

/// Local space dimensions for degree k on a d_K-gon.
struct SpaceDims {
  int k = 0;
  int d_K = 0;
  int m = 0;    // dim P_k
  int m1t = 0;  // dim P_{k+1}
  int m0 = 0;   // dim P_{k-1}
  int nH = 0;   // (k+1)(d_K + k + 1) - 1
  int nV = 0;   // (k+1) d_K + m0
};

SpaceDims space_dims(int k, int d_K);

/// Per-edge cached matrices. v1/v2 are the edge endpoints in canonical
/// order (lowest global node index first); `sign` is +1 when this element
/// traverses the edge in canonical order and -1 otherwise, so its outward
/// normal is sign * (canonical normal).
struct EdgeWorkspace {
  Vector2 v1, v2;
  double length = 0.0;
  double sign = 1.0;
  bool positive = true;
  bool boundary = false;
  Vector2 outward_normal;
  Matrix Me;   // (k+1) x m1t, edge monomials vs cell monomials up to k+1
  Matrix Be;   // m1t x (k+1), sign * Me^T (Mk^e)^-1
  Matrix CL;   // (k+2) x nV, boundary values of the V basis on this edge
  Matrix NL;   // (m1t-1) x (k+2), normal gradients vs Lagrange basis
  Matrix PL;   // m x (k+2), cell monomials vs Lagrange basis
  Matrix MCB;  // (k+2) x (k+1), Lagrange vs edge monomials (scaled by h_e)
};

/// Everything §3.1 caches for one element.
struct ElementWorkspace {
  SpaceDims dims;
  ElementGeometry geom;
  Vector mono;        // scaled-monomial integrals up to max(2k+2, 3k)
  int mono_degree = 0;
  Matrix MASS;        // m1t x m1t mass matrix of P_{k+1}
  Matrix Mass;        // leading m x m block
  Matrix tM;          // (m1t-1)^2 gradient matrix
  Matrix Mo;          // (m1t-1) x 2m
  Matrix Ao;          // 2m x m0 orthonormal basis of ker(Mo)
  Matrix Z;           // 2m x (m1t-1), Mo^T tM^-1
  Matrix MDelta;      // (m1t-1) x m0 Laplacian moments
  Matrix Dxy;         // 2m x m divergence moments of the vector monomials
  Matrix PV;          // (k+1)d_K x m1t point evaluations (vertex then edge nodes)
  Matrix H1;          // nH x nH edge-sign diagonal
  Matrix H2;          // nH x 2m edge-moment rows
  Matrix MassL;       // (k+2)^2 reference Lagrange mass
  RowVector c0;       // 1 x (k+2) reference Lagrange integrals
  Eigen::LLT<Matrix> Mass_llt;
  Eigen::LLT<Matrix> tM_llt;
  std::vector<EdgeWorkspace> edges;

  /// Solves Mass X = B.
  Matrix mass_solve(const Matrix& B) const { return Mass_llt.solve(B); }
  /// Blockwise Kron(I_blocks, Mass^-1) * B.
  Matrix mass_solve_blocks(const Matrix& B, int blocks) const;
  double mono_integral(int a, int b) const { return mono[monomial_index(a, b)]; }
};

/// Builds all cached matrices for one element; throws on degenerate
/// elements (singular Mass/tM), naming the element.
ElementWorkspace build_workspace(const PolygonalMesh& mesh, int element, int k);

}  // namespace polyvem
