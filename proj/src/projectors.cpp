#include "polyvem/projectors.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

#include "polyvem/quadrature.hpp"

namespace polyvem {

Matrix build_div_matrix(const ElementWorkspace& ws) {
  const SpaceDims& d = ws.dims;
  Matrix Bt = Matrix::Zero(d.m, d.nH);
  for (int e = 0; e < d.d_K; ++e)
    Bt.middleCols(e * (d.k + 1), d.k + 1) = ws.edges[e].Be.topRows(d.m);
  // Divergence-moment columns carry -I_m with its first column removed.
  for (int i = 1; i < d.m; ++i) Bt(i, (d.k + 1) * d.d_K + i - 1) = -1.0;
  return ws.mass_solve(Bt);
}

std::pair<Matrix, Matrix> build_Pb(const ElementWorkspace& ws, const Matrix& Di) {
  const SpaceDims& d = ws.dims;
  const int m = d.m, m1t = d.m1t;

  const Matrix Mmass_t = ws.MASS.block(1, 0, m1t - 1, m);
  Matrix Pr = -ws.Z * (Mmass_t * Di);

  Matrix Bstack = Matrix::Zero(m1t - 1, d.nH);
  for (int e = 0; e < d.d_K; ++e)
    Bstack.middleCols(e * (d.k + 1), d.k + 1) = ws.edges[e].Be.bottomRows(m1t - 1);
  Pr += ws.Z * Bstack;

  if (d.m0 > 0) {
    const Matrix IMASS = kron_identity(2, ws.Mass);
    const Matrix G = ws.Ao.transpose() * IMASS * ws.Ao;
    Eigen::LLT<Matrix> G_llt(G);
    if (G_llt.info() != Eigen::Success)
      throw std::runtime_error("build_Pb: degenerate rot-moment basis");
    Pr.rightCols(d.m0) +=
        (IMASS - ws.Z * ws.Mo) * ws.Ao * G_llt.solve(Matrix::Identity(d.m0, d.m0));
  }

  Matrix Pbt = ws.mass_solve_blocks(Pr, 2);
  Matrix Pb = kron_identity(2, Pbt);
  return {std::move(Pbt), std::move(Pb)};
}

void build_Rb(const ElementWorkspace& ws, Matrix& Rt, RowVector& eta1, Matrix& Rb) {
  const SpaceDims& d = ws.dims;
  const int m1t = d.m1t, m0 = d.m0;

  Matrix BR = Matrix::Zero(m1t - 1, d.nV);
  if (m0 > 0) {
    const Matrix Mk1 = ws.MASS.topLeftCorner(m0, m0);
    BR.rightCols(m0) = -ws.MDelta * Mk1.llt().solve(Matrix::Identity(m0, m0));
  }
  for (int e = 0; e < d.d_K; ++e) BR += ws.edges[e].NL * ws.edges[e].CL;
  Rt = ws.tM_llt.solve(BR);

  if (d.k == 0) {
    double perimeter = 0.0;
    eta1 = RowVector::Zero(d.nV);
    for (int e = 0; e < d.d_K; ++e) {
      const EdgeWorkspace& ew = ws.edges[e];
      perimeter += ew.length;
      const RowVector c1 = ew.Me.row(0).tail(m1t - 1);
      eta1 += ew.length * (ws.c0 * ew.CL) - c1 * Rt;
    }
    eta1 /= perimeter;
  } else {
    const RowVector c2 = ws.MASS.row(0).tail(m1t - 1);
    eta1 = RowVector::Zero(d.nV);
    eta1[(d.k + 1) * d.d_K] = 1.0;
    eta1 -= c2 * Rt;
    eta1 /= ws.MASS(0, 0);
  }

  Rb.resize(m1t, d.nV);
  Rb.row(0) = eta1;
  Rb.bottomRows(m1t - 1) = Rt;
}

std::pair<Matrix, Matrix> build_PU_PGU(const ElementWorkspace& ws, const Matrix& Rb) {
  const SpaceDims& d = ws.dims;
  const int m = d.m, m0 = d.m0;

  Matrix stack = Matrix::Zero(m, d.nV);
  stack.block(0, (d.k + 1) * d.d_K, m0, m0) = Matrix::Identity(m0, m0);
  stack.bottomRows(m - m0) = ws.MASS.block(m0, 0, m - m0, d.m1t) * Rb;
  Matrix PU = ws.mass_solve(stack);

  Matrix X = -ws.Dxy * PU;
  for (int e = 0; e < d.d_K; ++e) {
    const EdgeWorkspace& ew = ws.edges[e];
    const Matrix PLCL = ew.PL * ew.CL;
    X.topRows(m) += ew.outward_normal.x() * PLCL;
    X.bottomRows(m) += ew.outward_normal.y() * PLCL;
  }
  Matrix PGU = kron_identity(2, ws.mass_solve_blocks(X, 2));
  return {std::move(PU), std::move(PGU)};
}

ProjectorSet build_projectors(const ElementWorkspace& ws) {
  ProjectorSet ps;
  ps.Di = build_div_matrix(ws);
  std::tie(ps.Pbt, ps.Pb) = build_Pb(ws, ps.Di);
  build_Rb(ws, ps.Rt, ps.eta1, ps.Rb);
  std::tie(ps.PU, ps.PGU) = build_PU_PGU(ws, ps.Rb);
  ps.Ha = ws.H1 - ws.H2 * ps.Pbt;
  const int nV = ws.dims.nV;
  Matrix eval(nV, ws.dims.m1t);
  eval.topRows(ws.PV.rows()) = ws.PV;
  eval.bottomRows(ws.dims.m0) = ws.MASS.topRows(ws.dims.m0);
  ps.Hd = Matrix::Identity(nV, nV) - eval * ps.Rb;
  return ps;
}

Vector dofs_H_row(const ElementWorkspace& ws, const VectorField& tau_row) {
  const SpaceDims& d = ws.dims;
  Vector dofs = Vector::Zero(d.nH);
  const GaussRule& rule = gauss_rule(gauss_points_for(2 * d.k + 3));

  for (int e = 0; e < d.d_K; ++e) {
    const EdgeWorkspace& ew = ws.edges[e];
    // Canonical edge normal: the traversal direction v1 -> v2 rotated by
    // -90 degrees, shared by both adjacent elements.
    const Vector2 t_hat = (ew.v2 - ew.v1) / ew.length;
    const Vector2 nu(t_hat.y(), -t_hat.x());
    Vector moments = Vector::Zero(d.k + 1);
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double t = rule.nodes[q];
      const Vector2 x = (1.0 - t) * ew.v1 + t * ew.v2;
      const double flux = tau_row(x).dot(nu);
      double run = rule.weights[q] * ew.length * flux;
      for (int i = 0; i <= d.k; ++i) {
        moments[i] += run;
        run *= (t - 0.5);
      }
    }
    dofs.segment(e * (d.k + 1), d.k + 1) = moments;
  }

  const int order = 2 * d.k + 2;
  if (d.m > 1) {
    for (int i = 1; i < d.m; ++i) {
      dofs[(d.k + 1) * d.d_K + i - 1] = integrate_on_element(
          ws.geom,
          [&](const Vector2& x) {
            const Matrix grad = eval_scaled_monomial_gradients(ws.geom, d.k, x);
            return tau_row(x).dot(grad.row(i).transpose());
          },
          order);
    }
  }
  if (d.m0 > 0) {
    Vector vx(d.m), vy(d.m);
    for (int j = 0; j < d.m; ++j) {
      vx[j] = integrate_on_element(
          ws.geom,
          [&](const Vector2& x) { return tau_row(x).x() * eval_scaled_monomial(ws.geom, j, x); },
          order);
      vy[j] = integrate_on_element(
          ws.geom,
          [&](const Vector2& x) { return tau_row(x).y() * eval_scaled_monomial(ws.geom, j, x); },
          order);
    }
    for (int r = 0; r < d.m0; ++r)
      dofs[(d.k + 1) * d.d_K + d.m - 1 + r] =
          ws.Ao.col(r).head(d.m).dot(vx) + ws.Ao.col(r).tail(d.m).dot(vy);
  }
  return dofs;
}

Vector dofs_H(const ElementWorkspace& ws, const TensorField& tau) {
  Vector dofs(2 * ws.dims.nH);
  dofs.head(ws.dims.nH) = dofs_H_row(
      ws, [&](const Vector2& x) -> Vector2 { return tau(x).row(0).transpose(); });
  dofs.tail(ws.dims.nH) = dofs_H_row(
      ws, [&](const Vector2& x) -> Vector2 { return tau(x).row(1).transpose(); });
  return dofs;
}

Vector dofs_V_scalar(const ElementWorkspace& ws, const ScalarField& v) {
  const SpaceDims& d = ws.dims;
  Vector dofs(d.nV);
  for (int i = 0; i < d.d_K; ++i) dofs[i] = v(ws.geom.vertices[i]);
  for (int e = 0; e < d.d_K; ++e) {
    const Vector2& a = ws.geom.vertices[e];
    const Vector2& b = ws.geom.vertices[(e + 1) % d.d_K];
    for (int r = 1; r <= d.k; ++r) {
      const double t = static_cast<double>(r) / (d.k + 1);
      dofs[d.d_K + e * d.k + (r - 1)] = v(Vector2((1.0 - t) * a + t * b));
    }
  }
  for (int q = 0; q < d.m0; ++q)
    dofs[(d.k + 1) * d.d_K + q] = integrate_on_element(
        ws.geom,
        [&](const Vector2& x) { return v(x) * eval_scaled_monomial(ws.geom, q, x); },
        2 * d.k + 2);
  return dofs;
}

Vector dofs_V(const ElementWorkspace& ws, const VectorField& v) {
  Vector dofs(2 * ws.dims.nV);
  dofs.head(ws.dims.nV) =
      dofs_V_scalar(ws, [&](const Vector2& x) { return v(x).x(); });
  dofs.tail(ws.dims.nV) =
      dofs_V_scalar(ws, [&](const Vector2& x) { return v(x).y(); });
  return dofs;
}

}  // namespace polyvem
