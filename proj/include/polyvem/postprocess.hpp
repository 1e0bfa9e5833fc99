#pragma once

#include "polyvem/assembly.hpp"

namespace polyvem {

/// Piecewise-polynomial approximations computable from the converged DOFs:
/// sigma_hat = P_k(sigma_h) (4m tensor coefficients per element),
/// u_hat = P_k(u_h) (2m coefficients per element), and the pressure from
/// the trace formula with c_hat = -||u_hat||^2 / (2 |Omega|).
struct ComputableSolution {
  int k = 0;
  std::vector<Vector> aK;  // per element, 4m
  std::vector<Vector> bK;  // per element, 2m
  double c_hat = 0.0;
  double domain_area = 0.0;

  Matrix2 sigma_hat(const Assembler::ElementCache& c, const Vector2& x, int element) const;
  Vector2 u_hat(const Assembler::ElementCache& c, const Vector2& x, int element) const;
  Matrix2 grad_u_hat(const Assembler::ElementCache& c, const Vector2& x, int element) const;
  double p_hat(const Assembler::ElementCache& c, const Vector2& x, int element) const;

  /// Monomial coefficients of p_hat on one element (degree 2k basis).
  Vector pressure_coefficients(const Assembler::ElementCache& c, int element) const;
};

ComputableSolution postprocess(const Assembler& assembler, const NewtonState& state);

/// Mean of p_hat over the domain (exact, from coefficients) and its L2 norm.
std::pair<double, double> pressure_mean_and_norm(const Assembler& assembler,
                                                 const ComputableSolution& sol);

struct ExactSolution {
  VectorField u;
  TensorField grad_u;
  ScalarField p;
  TensorField sigma;
};

struct ErrorValues {
  double e_sigma = 0.0;
  double e_u = 0.0;
  double e_uH1 = 0.0;  // broken H1 norm of u - u_hat
  double e_p = 0.0;
};

/// Elementwise quadrature of the squared differences at order 2k+6.
ErrorValues compute_errors(const Assembler& assembler, const ComputableSolution& sol,
                           const ExactSolution& exact);

/// Experimental order between two consecutive levels.
inline double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

}  // namespace polyvem
