#pragma once

#include "polyvem/linalg.hpp"

namespace polyvem {

struct ElementGeometry;  // mesh.hpp

// ---------------------------------------------------------------------------
// Scaled monomial indexing. Monomials ((x-x_K)/h_K)^a ((y-y_K)/h_K)^b are
// ordered hierarchically: index i (0-based) for exponents (a,b) is
// (a+b+1)(a+b+2)/2 - b - 1, so indices 0..dim(l-1)-1 span degree <= l-1 and
// index 0 is the constant.
// ---------------------------------------------------------------------------

/// dim P_l = (l+1)(l+2)/2.
inline int monomial_space_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

inline int monomial_index(int a, int b) {
  const int d = a + b;
  return (d + 1) * (d + 2) / 2 - b - 1;
}

struct Exponents {
  int a;
  int b;
};

/// Inverse of monomial_index.
Exponents monomial_exponents(int index);

/// Values of all scaled monomials up to total degree `degree` at x,
/// by running products (no pow calls).
Vector eval_scaled_monomials(const ElementGeometry& geom, int degree, const Vector2& x);

inline double eval_scaled_monomial(const ElementGeometry& geom, int index, const Vector2& x) {
  Exponents e = monomial_exponents(index);
  return eval_scaled_monomials(geom, e.a + e.b, x)[index];
}

/// Gradients of all scaled monomials up to `degree` at x; row i holds
/// (d/dx, d/dy) of monomial i.
Matrix eval_scaled_monomial_gradients(const ElementGeometry& geom, int degree, const Vector2& x);

/// Coefficient matrices of d/dx and d/dy acting on monomial coefficients:
/// columns index the source basis of degree `degree`, rows the target basis
/// of degree `degree-1` (padded to the same dimension count given).
Matrix monomial_dx_matrix(const ElementGeometry& geom, int degree);
Matrix monomial_dy_matrix(const ElementGeometry& geom, int degree);

/// Coefficients of the product of two monomial-coefficient polynomials,
/// exact by exponent addition (degrees add).
Vector monomial_coeff_product(const Vector& c1, int deg1, const Vector& c2, int deg2);

// ---------------------------------------------------------------------------
// Lagrange basis on k+2 uniformly spaced nodes of [0,1]. For an edge with
// positive orientation the nodes are t_j = j/(k+1); reversing the
// orientation maps them to 1 - j/(k+1).
// ---------------------------------------------------------------------------

/// Node t_j (0-based j) for the given orientation.
inline double lagrange_node(int k, bool positive, int j) {
  const double t = static_cast<double>(j) / (k + 1);
  return positive ? t : 1.0 - t;
}

/// Values of all k+2 Lagrange basis functions at t.
Vector eval_lagrange(int k, bool positive, double t);

// ---------------------------------------------------------------------------
// Reference edge matrices, precomputed once per degree k on [0,1] and scaled
// by h_e where needed. phi_hat_i(t) = (t - 1/2)^(i-1).
// ---------------------------------------------------------------------------

struct EdgeReference {
  int k;
  Matrix Mk_hat;              // (k+1)x(k+1), int phi_hat_i phi_hat_j
  Matrix Mk_hat_inv;          // its inverse
  Matrix MCB_hat_pos;         // (k+2)x(k+1), int L_hat_i phi_hat_j, positive nodes
  Matrix MCB_hat_neg;         // reversed nodes
  Matrix MassL_hat;           // (k+2)x(k+2), int L_hat_i L_hat_j (orientation independent)
  RowVector c0;               // 1x(k+2), int L_hat_j (orientation independent)
};

/// Cached per-degree reference matrices.
const EdgeReference& edge_reference(int k);

}  // namespace polyvem
