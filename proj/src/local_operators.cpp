#include "polyvem/local_operators.hpp"

#include <stdexcept>

#include "polyvem/quadrature.hpp"

namespace polyvem {

void ProblemParams::validate() const {
  if (!(mu > 0.0)) throw std::invalid_argument("params: mu must be positive");
  if (!(kappa1 > 0.0) || !(kappa3 > 0.0))
    throw std::invalid_argument("params: kappa1 and kappa3 must be positive");
  if (!(kappa2 > 0.0) || !(kappa2 < 2.0 * mu))
    throw std::invalid_argument("params: kappa2 must satisfy 0 < kappa2 < 2 mu");
}

Matrix deviator_pattern() {
  Matrix M(4, 4);
  M << 0.5, 0, 0, -0.5,
       0, 1, 0, 0,
       0, 0, 1, 0,
       -0.5, 0, 0, 0.5;
  return M;
}

Matrix trace_pattern() {
  Matrix M = Matrix::Zero(4, 4);
  M(0, 0) = M(0, 3) = M(3, 0) = M(3, 3) = 1.0;
  return M;
}

void build_H_operators(const ProjectorSet& ps, const ElementWorkspace& ws,
                       Matrix& Adev, Matrix& Atr, Matrix& Adiv, Matrix& Asta,
                       Vector& atra) {
  Adev = ps.Pb.transpose() * kron(deviator_pattern(), ws.Mass) * ps.Pb;
  Atr = ps.Pb.transpose() * kron(trace_pattern(), ws.Mass) * ps.Pb;
  Adiv = kron_identity(2, ps.Di.transpose() * ws.Mass * ps.Di);
  Asta = kron_identity(2, ps.Ha.transpose() * ps.Ha);
  Matrix ones(4, 1);
  ones << 1, 0, 0, 1;
  atra = ps.Pb.transpose() * kron(ones, ws.Mass.col(0));
}

void build_V_operators(const ProjectorSet& ps, const ElementWorkspace& ws,
                       Matrix& Dgra, Matrix& Dsta, Matrix& Dbou) {
  Dgra = kron_identity(2, ps.Rt.transpose() * ws.tM * ps.Rt);
  Dsta = kron_identity(2, ps.Hd.transpose() * ps.Hd);
  const int nV = ws.dims.nV;
  Matrix acc = Matrix::Zero(nV, nV);
  for (const EdgeWorkspace& ew : ws.edges)
    if (ew.boundary) acc += ew.length * ew.CL.transpose() * ws.MassL * ew.CL;
  Dbou = kron_identity(2, acc);
}

void build_coupling(const ProjectorSet& ps, const ElementWorkspace& ws,
                    Matrix& B, Matrix& C) {
  B = kron_identity(2, ps.Di.transpose() * ws.Mass * ps.PU);
  C = ps.PGU.transpose() * kron(deviator_pattern(), ws.Mass) * ps.Pb;
}

Matrix edge_data_projection(const ElementWorkspace& ws, int edge, const VectorField& g) {
  const EdgeWorkspace& ew = ws.edges[edge];
  const int k = ws.dims.k;
  const GaussRule& rule = gauss_rule(gauss_points_for(2 * k + 3));
  Matrix rhs = Matrix::Zero(k + 1, 2);
  for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    const Vector2 gx = g(Vector2((1.0 - t) * ew.v1 + t * ew.v2));
    double run = rule.weights[q];
    for (int i = 0; i <= k; ++i) {
      rhs(i, 0) += run * gx.x();
      rhs(i, 1) += run * gx.y();
      run *= (t - 0.5);
    }
  }
  // (Mk^e)^-1 [h_e int phi_hat g]; the edge length cancels against the
  // reference-mass scaling.
  return edge_reference(k).Mk_hat_inv * rhs;
}

void build_rhs(const ProjectorSet& ps, const ElementWorkspace& ws,
               const ProblemParams& params, Vector& b1, Vector& b2, Vector& b3,
               Vector& b4) {
  const SpaceDims& d = ws.dims;
  b1 = Vector::Zero(2 * d.nH);
  b3 = Vector::Zero(2 * d.nV);
  for (int e = 0; e < d.d_K; ++e) {
    const EdgeWorkspace& ew = ws.edges[e];
    if (!ew.boundary) continue;
    const Matrix Pg = edge_data_projection(ws, e, params.g);
    b1.segment(e * (d.k + 1), d.k + 1) = ew.sign * Pg.col(0);
    b1.segment(d.nH + e * (d.k + 1), d.k + 1) = ew.sign * Pg.col(1);
    const Matrix CtM = ew.CL.transpose() * ew.MCB;
    b3.head(d.nV) += CtM * Pg.col(0);
    b3.tail(d.nV) += CtM * Pg.col(1);
  }

  Vector f1(d.m), f2(d.m);
  for (int i = 0; i < d.m; ++i) {
    f1[i] = integrate_on_element(
        ws.geom,
        [&](const Vector2& x) { return params.f(x).x() * eval_scaled_monomial(ws.geom, i, x); },
        2 * d.k + 2);
    f2[i] = integrate_on_element(
        ws.geom,
        [&](const Vector2& x) { return params.f(x).y() * eval_scaled_monomial(ws.geom, i, x); },
        2 * d.k + 2);
  }
  b2.resize(2 * d.nH);
  b2.head(d.nH) = ps.Di.transpose() * f1;
  b2.tail(d.nH) = ps.Di.transpose() * f2;
  b4.resize(2 * d.nV);
  b4.head(d.nV) = ps.PU.transpose() * f1;
  b4.tail(d.nV) = ps.PU.transpose() * f2;
}

LocalOperators build_local_operators(const ProjectorSet& ps, const ElementWorkspace& ws,
                                     const ProblemParams& params) {
  LocalOperators ops;
  build_H_operators(ps, ws, ops.Adev, ops.Atr, ops.Adiv, ops.Asta, ops.atra);
  build_V_operators(ps, ws, ops.Dgra, ops.Dsta, ops.Dbou);
  build_coupling(ps, ws, ops.B, ops.C);
  build_rhs(ps, ws, params, ops.b1, ops.b2, ops.b3, ops.b4);
  return ops;
}

}  // namespace polyvem
