#pragma once

#include <vector>

#include "polyvem/convection.hpp"
#include "polyvem/local_operators.hpp"
#include "polyvem/mesh.hpp"

namespace polyvem {

/// Global DOF numbering. Layout: per edge 2(k+1) pseudostress normal
/// moments (row 1 then row 2), per element 2(m-1+m0) cell moments, then per
/// node 2 velocity values, per edge 2k interior velocity values in
/// canonical edge order, per element 2m0 velocity moments, and finally the
/// trace multiplier at index N-1.
struct DofMap {
  int N = 0;
  int xi_index = 0;
  std::vector<IndexVector> uH;  // per element, 2nH global indices [p^H; q^H]
  std::vector<IndexVector> uV;  // per element, 2nV global indices [p^V; q^V]
};

DofMap build_dof_map(const PolygonalMesh& mesh, int k);

struct GlobalSystem {
  SparseMatrix DA;  // Newton matrix (DG blocks)
  SparseMatrix A;   // residual-form matrix (G blocks)
  Vector b;
};

/// Precomputes per-element operators once; only the convection blocks are
/// rebuilt per Newton iterate.
class Assembler {
 public:
  Assembler(const PolygonalMesh& mesh, int k, const ProblemParams& params);

  const PolygonalMesh& mesh() const { return *mesh_; }
  int degree() const { return k_; }
  const ProblemParams& params() const { return params_; }
  const DofMap& dof_map() const { return dofmap_; }
  int system_size() const { return dofmap_.N; }
  double domain_area() const { return domain_area_; }

  /// Assembles DA^(s), A^(s) and b for the iterate x (length N or empty for
  /// the zero iterate).
  GlobalSystem assemble(const Vector& x) const;

  /// Global DOF vector of the interpolated identity tensor: the kernel of
  /// the unconstrained system and the direction the trace multiplier
  /// controls.
  const Vector& identity_kernel() const { return kernel_; }
  /// Assembled trace functional (the multiplier column, zero on the
  /// velocity block and the multiplier itself).
  const Vector& trace_functional() const { return trace_; }

  struct ElementCache {
    ElementGeometry geom;
    SpaceDims dims;
    Vector mono;      // monomial integral table (triple products)
    Matrix Mass;
    Matrix PU;        // m x nV
    Matrix PbT;       // 2nH x 4m
    Matrix PGUT;      // 2nV x 4m
    Matrix KHH;       // Adev + Asta + kappa1 Adiv
    Matrix KHV;       // mu B
    Matrix KVH;       // -mu B^T - kappa2 C
    Matrix KVV;       // kappa2 mu Dgra + Dsta + kappa3 Dbou
    Vector atra;
    Vector bH;        // mu b1 - kappa1 b2
    Vector bV;        // kappa3 b3 + mu b4
  };
  const std::vector<ElementCache>& elements() const { return cache_; }

 private:
  const PolygonalMesh* mesh_;
  int k_;
  ProblemParams params_;
  DofMap dofmap_;
  double domain_area_ = 0.0;
  std::vector<ElementCache> cache_;
  Vector kernel_;
  Vector trace_;
};

/// Sparse LU direct solve with a residual check; throws on singular or
/// ill-conditioned systems.
Vector solve_linear(const SparseMatrix& A, const Vector& b);

/// Direct solve of the trace-constrained system [K a; a^t 0][x; eta] = b.
/// The multiplier is eliminated through the kernel vector z of K (K z = 0,
/// z^t K = 0, a^t z != 0), so only the sparse leading block is factorized;
/// the dense multiplier column never enters the factorization. Verified
/// against the full matrix by the same residual bound as solve_linear.
Vector solve_bordered(const SparseMatrix& full, const Vector& b, const Vector& kernel,
                      const Vector& trace);

struct NewtonState {
  Vector x;                             // sigma, u and xi DOFs
  int iterations = 0;                   // Newton steps after the Stokes solve
  std::vector<double> increment_norms;  // Euclidean, including xi
  std::vector<double> residual_norms;   // ||b - A^(s) x^(s)||_2 before each step
  double xi = 0.0;
};

/// Newton iteration initialized with the linear Stokes solution; stops when
/// the Euclidean norm of the full increment drops below tol.
NewtonState newton_solve(const Assembler& assembler, double tol, int maxit);

}  // namespace polyvem
