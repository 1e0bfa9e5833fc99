#include "polyvem/postprocess.hpp"

#include <cmath>

#include "polyvem/quadrature.hpp"

namespace polyvem {

Matrix2 ComputableSolution::sigma_hat(const Assembler::ElementCache& c, const Vector2& x,
                                      int element) const {
  const int m = c.dims.m;
  const Vector phi = eval_scaled_monomials(c.geom, k, x);
  const Vector& a = aK[element];
  Matrix2 s;
  s(0, 0) = a.segment(0, m).dot(phi);
  s(0, 1) = a.segment(m, m).dot(phi);
  s(1, 0) = a.segment(2 * m, m).dot(phi);
  s(1, 1) = a.segment(3 * m, m).dot(phi);
  return s;
}

Vector2 ComputableSolution::u_hat(const Assembler::ElementCache& c, const Vector2& x,
                                  int element) const {
  const int m = c.dims.m;
  const Vector phi = eval_scaled_monomials(c.geom, k, x);
  const Vector& b = bK[element];
  return Vector2(b.head(m).dot(phi), b.tail(m).dot(phi));
}

Matrix2 ComputableSolution::grad_u_hat(const Assembler::ElementCache& c, const Vector2& x,
                                       int element) const {
  const int m = c.dims.m;
  const Matrix grads = eval_scaled_monomial_gradients(c.geom, k, x);
  const Vector& b = bK[element];
  Matrix2 g;
  g.row(0) = (b.head(m).transpose() * grads.topRows(m));
  g.row(1) = (b.tail(m).transpose() * grads.topRows(m));
  return g;
}

double ComputableSolution::p_hat(const Assembler::ElementCache& c, const Vector2& x,
                                 int element) const {
  const Matrix2 s = sigma_hat(c, x, element);
  const Vector2 u = u_hat(c, x, element);
  return -0.5 * (s.trace() + 2.0 * c_hat + u.squaredNorm());
}

Vector ComputableSolution::pressure_coefficients(const Assembler::ElementCache& c,
                                                 int element) const {
  const int m = c.dims.m;
  const Vector& a = aK[element];
  const Vector& b = bK[element];
  Vector coeff = Vector::Zero(monomial_space_dim(2 * k));
  coeff.head(m) = a.segment(0, m) + a.segment(3 * m, m);
  coeff += monomial_coeff_product(b.head(m), k, b.head(m), k);
  coeff += monomial_coeff_product(b.tail(m), k, b.tail(m), k);
  coeff[0] += 2.0 * c_hat;
  return -0.5 * coeff;
}

ComputableSolution postprocess(const Assembler& assembler, const NewtonState& state) {
  ComputableSolution sol;
  sol.k = assembler.degree();
  sol.domain_area = assembler.domain_area();
  const DofMap& map = assembler.dof_map();
  const auto& cache = assembler.elements();
  const int nK = assembler.mesh().element_count();
  sol.aK.resize(nK);
  sol.bK.resize(nK);
  double u_norm2 = 0.0;
  for (int K = 0; K < nK; ++K) {
    const Assembler::ElementCache& c = cache[K];
    const int nV = c.dims.nV;
    Vector alpha(map.uH[K].size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha[i] = state.x[map.uH[K][i]];
    Vector beta(map.uV[K].size());
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] = state.x[map.uV[K][i]];
    sol.aK[K] = c.PbT.transpose() * alpha;
    Vector b(2 * c.dims.m);
    b.head(c.dims.m) = c.PU * beta.head(nV);
    b.tail(c.dims.m) = c.PU * beta.tail(nV);
    u_norm2 += b.head(c.dims.m).dot(c.Mass * b.head(c.dims.m)) +
               b.tail(c.dims.m).dot(c.Mass * b.tail(c.dims.m));
    sol.bK[K] = std::move(b);
  }
  sol.c_hat = -0.5 * u_norm2 / sol.domain_area;
  return sol;
}

std::pair<double, double> pressure_mean_and_norm(const Assembler& assembler,
                                                 const ComputableSolution& sol) {
  double mean = 0.0, norm2 = 0.0;
  const auto& cache = assembler.elements();
  for (int K = 0; K < assembler.mesh().element_count(); ++K) {
    const Assembler::ElementCache& c = cache[K];
    const Vector coeff = sol.pressure_coefficients(c, K);
    for (int i = 0; i < coeff.size(); ++i) mean += coeff[i] * c.mono[i];
    const Vector sq = monomial_coeff_product(coeff, 2 * sol.k, coeff, 2 * sol.k);
    for (int i = 0; i < sq.size(); ++i) norm2 += sq[i] * c.mono[i];
  }
  return {mean, std::sqrt(std::max(0.0, norm2))};
}

ErrorValues compute_errors(const Assembler& assembler, const ComputableSolution& sol,
                           const ExactSolution& exact) {
  ErrorValues err;
  const int order = 2 * sol.k + 6;
  const auto& cache = assembler.elements();
  double s2 = 0.0, u2 = 0.0, uh1 = 0.0, p2 = 0.0;
  for (int K = 0; K < assembler.mesh().element_count(); ++K) {
    const Assembler::ElementCache& c = cache[K];
    s2 += integrate_on_element(
        c.geom,
        [&](const Vector2& x) {
          return (exact.sigma(x) - sol.sigma_hat(c, x, K)).squaredNorm();
        },
        order);
    u2 += integrate_on_element(
        c.geom,
        [&](const Vector2& x) { return (exact.u(x) - sol.u_hat(c, x, K)).squaredNorm(); },
        order);
    uh1 += integrate_on_element(
        c.geom,
        [&](const Vector2& x) {
          return (exact.u(x) - sol.u_hat(c, x, K)).squaredNorm() +
                 (exact.grad_u(x) - sol.grad_u_hat(c, x, K)).squaredNorm();
        },
        order);
    p2 += integrate_on_element(
        c.geom, [&](const Vector2& x) { return std::pow(exact.p(x) - sol.p_hat(c, x, K), 2); },
        order);
  }
  err.e_sigma = std::sqrt(s2);
  err.e_u = std::sqrt(u2);
  err.e_uH1 = std::sqrt(uh1);
  err.e_p = std::sqrt(p2);
  return err;
}

}  // namespace polyvem
