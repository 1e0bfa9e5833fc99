#include "polyvem/workspace.hpp"

#include <Eigen/QR>
#include <stdexcept>

#include "polyvem/quadrature.hpp"

namespace polyvem {

SpaceDims space_dims(int k, int d_K) {
  if (k < 0) throw std::invalid_argument("space_dims: k must be >= 0");
  SpaceDims d;
  d.k = k;
  d.d_K = d_K;
  d.m = monomial_space_dim(k);
  d.m1t = monomial_space_dim(k + 1);
  d.m0 = k * (k + 1) / 2;
  d.nH = (k + 1) * (d_K + k + 1) - 1;
  d.nV = (k + 1) * d_K + d.m0;
  return d;
}

Matrix ElementWorkspace::mass_solve_blocks(const Matrix& B, int blocks) const {
  const int m = dims.m;
  Matrix out(B.rows(), B.cols());
  for (int i = 0; i < blocks; ++i)
    out.middleRows(i * m, m) = Mass_llt.solve(B.middleRows(i * m, m));
  return out;
}

namespace {

/// Mass matrix of the scaled monomials up to `degree` from the integral table.
Matrix mass_from_table(const Vector& mono, int degree) {
  const int dim = monomial_space_dim(degree);
  Matrix M(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Exponents ei = monomial_exponents(i);
    for (int j = i; j < dim; ++j) {
      const Exponents ej = monomial_exponents(j);
      M(i, j) = M(j, i) = mono[monomial_index(ei.a + ej.a, ei.b + ej.b)];
    }
  }
  return M;
}

}  // namespace

ElementWorkspace build_workspace(const PolygonalMesh& mesh, int element, int k) {
  ElementWorkspace ws;
  ws.geom = element_geometry(mesh, element);
  ws.dims = space_dims(k, ws.geom.edge_count);
  const SpaceDims& d = ws.dims;
  const int m = d.m, m1t = d.m1t, m0 = d.m0;
  const double hK = ws.geom.diameter;

  // High enough for products of P_{k+1} pairs, the convection triple
  // products (3k), and squared postprocessed-pressure coefficients (4k).
  ws.mono_degree = std::max(2 * (k + 1), 4 * k);
  ws.mono = monomial_integrals(ws.geom, ws.mono_degree);

  ws.MASS = mass_from_table(ws.mono, k + 1);
  ws.Mass = ws.MASS.topLeftCorner(m, m);
  ws.Mass_llt.compute(ws.Mass);
  if (ws.Mass_llt.info() != Eigen::Success)
    throw std::runtime_error("build_workspace: singular mass matrix on element " +
                             std::to_string(element));

  // tM(i,j) = int grad(phi_{i+1}) . grad(phi_{j+1}); derivatives of scaled
  // monomials are scaled monomials of one lower degree times a/h_K.
  ws.tM.setZero(m1t - 1, m1t - 1);
  for (int i = 1; i < m1t; ++i) {
    const Exponents ei = monomial_exponents(i);
    for (int j = i; j < m1t; ++j) {
      const Exponents ej = monomial_exponents(j);
      double val = 0.0;
      if (ei.a > 0 && ej.a > 0)
        val += ei.a * ej.a * ws.mono[monomial_index(ei.a + ej.a - 2, ei.b + ej.b)];
      if (ei.b > 0 && ej.b > 0)
        val += ei.b * ej.b * ws.mono[monomial_index(ei.a + ej.a, ei.b + ej.b - 2)];
      ws.tM(i - 1, j - 1) = ws.tM(j - 1, i - 1) = val / (hK * hK);
    }
  }
  ws.tM_llt.compute(ws.tM);
  if (ws.tM_llt.info() != Eigen::Success)
    throw std::runtime_error("build_workspace: singular gradient matrix on element " +
                             std::to_string(element));

  // Mo = [ int dx(phi_{i+1}) phi_j | int dy(phi_{i+1}) phi_j ], j up to m.
  ws.Mo.setZero(m1t - 1, 2 * m);
  for (int i = 1; i < m1t; ++i) {
    const Exponents ei = monomial_exponents(i);
    for (int j = 0; j < m; ++j) {
      const Exponents ej = monomial_exponents(j);
      if (ei.a > 0)
        ws.Mo(i - 1, j) = ei.a / hK * ws.mono[monomial_index(ei.a - 1 + ej.a, ei.b + ej.b)];
      if (ei.b > 0)
        ws.Mo(i - 1, m + j) = ei.b / hK * ws.mono[monomial_index(ei.a + ej.a, ei.b - 1 + ej.b)];
    }
  }

  // Ao: orthonormal basis of ker(Mo) from the full QR of Mo^T.
  if (m0 > 0) {
    Eigen::HouseholderQR<Matrix> qr(ws.Mo.transpose());
    Matrix Q = qr.householderQ();
    ws.Ao = Q.rightCols(m0);
  } else {
    ws.Ao.resize(2 * m, 0);
  }

  ws.Z = ws.tM_llt.solve(ws.Mo).transpose();

  // MDelta(i,j) = int Laplacian(phi_{i+1}) phi_j for j in the P_{k-1} basis.
  ws.MDelta.setZero(m1t - 1, m0);
  for (int i = 1; i < m1t; ++i) {
    const Exponents ei = monomial_exponents(i);
    for (int j = 0; j < m0; ++j) {
      const Exponents ej = monomial_exponents(j);
      double val = 0.0;
      if (ei.a > 1)
        val += ei.a * (ei.a - 1) * ws.mono[monomial_index(ei.a - 2 + ej.a, ei.b + ej.b)];
      if (ei.b > 1)
        val += ei.b * (ei.b - 1) * ws.mono[monomial_index(ei.a + ej.a, ei.b - 2 + ej.b)];
      ws.MDelta(i - 1, j) = val / (hK * hK);
    }
  }

  // Dxy = [0; Dx; 0; Dy]: divergences of the vector monomials against P_k.
  ws.Dxy.setZero(2 * m, m);
  if (m > 1) {
    ws.Dxy.middleRows(1, m - 1) = ws.Mo.topLeftCorner(m - 1, m);
    ws.Dxy.middleRows(m + 1, m - 1) = ws.Mo.block(0, m, m - 1, m);
  }

  const MeshElement& elem = mesh.elements[element];
  const EdgeReference& ref = edge_reference(k);
  ws.MassL = ref.MassL_hat;
  ws.c0 = ref.c0;

  // Boundary evaluation points in local DOF order: vertices, then the k
  // interior points per edge counted from the local start vertex.
  ws.PV.resize((k + 1) * d.d_K, m1t);
  for (int v = 0; v < d.d_K; ++v)
    ws.PV.row(v) = eval_scaled_monomials(ws.geom, k + 1, ws.geom.vertices[v]).transpose();
  for (int e = 0; e < d.d_K; ++e) {
    const Vector2& a = ws.geom.vertices[e];
    const Vector2& b = ws.geom.vertices[(e + 1) % d.d_K];
    for (int r = 1; r <= k; ++r) {
      const double t = static_cast<double>(r) / (k + 1);
      ws.PV.row(d.d_K + e * k + (r - 1)) =
          eval_scaled_monomials(ws.geom, k + 1, Vector2((1.0 - t) * a + t * b)).transpose();
    }
  }

  const GaussRule& rule = gauss_rule(gauss_points_for(2 * k + 3));
  ws.edges.resize(d.d_K);
  ws.H1.setZero(d.nH, d.nH);
  ws.H2.setZero(d.nH, 2 * m);
  for (int e = 0; e < d.d_K; ++e) {
    EdgeWorkspace& ew = ws.edges[e];
    const int ga = elem.vertices[e];
    const int gb = elem.vertices[(e + 1) % d.d_K];
    ew.positive = elem.edge_positive[e];
    ew.sign = ew.positive ? 1.0 : -1.0;
    ew.boundary = mesh.edges[elem.edges[e]].boundary;
    const Vector2 pa = mesh.nodes[ga];
    const Vector2 pb = mesh.nodes[gb];
    ew.v1 = ew.positive ? pa : pb;
    ew.v2 = ew.positive ? pb : pa;
    ew.length = ws.geom.edge_length[e];
    ew.outward_normal = ws.geom.edge_normal[e];

    ew.Me.setZero(k + 1, m1t);
    ew.NL.setZero(m1t - 1, k + 2);
    ew.PL.setZero(m, k + 2);
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double t = rule.nodes[q];
      const double w = rule.weights[q] * ew.length;
      const Vector2 x = (1.0 - t) * ew.v1 + t * ew.v2;
      const Vector phiK = eval_scaled_monomials(ws.geom, k + 1, x);
      const Matrix grad = eval_scaled_monomial_gradients(ws.geom, k + 1, x);
      const Vector lag = eval_lagrange(k, ew.positive, t);
      Vector phiE(k + 1);
      double run = 1.0;
      for (int i = 0; i <= k; ++i) {
        phiE[i] = run;
        run *= (t - 0.5);
      }
      ew.Me += w * phiE * phiK.transpose();
      ew.NL += w * (grad.bottomRows(m1t - 1) * ew.outward_normal) * lag.transpose();
      ew.PL += w * phiK.head(m) * lag.transpose();
    }
    ew.Be = (ew.sign / ew.length) * ew.Me.transpose() * ref.Mk_hat_inv;
    ew.MCB = ew.length * (ew.positive ? ref.MCB_hat_pos : ref.MCB_hat_neg);

    // CL maps local V DOFs to the k+2 Lagrange values on this edge, ordered
    // from the local start vertex.
    ew.CL.setZero(k + 2, d.nV);
    ew.CL(0, e) = 1.0;
    ew.CL(k + 1, (e + 1) % d.d_K) = 1.0;
    for (int r = 0; r < k; ++r) ew.CL(1 + r, d.d_K + e * k + r) = 1.0;

    ws.H1.block(e * (k + 1), e * (k + 1), k + 1, k + 1) =
        ew.sign * Matrix::Identity(k + 1, k + 1);
    ws.H2.middleRows(e * (k + 1), k + 1) << ew.outward_normal.x() * ew.Me.leftCols(m),
        ew.outward_normal.y() * ew.Me.leftCols(m);
  }

  return ws;
}

}  // namespace polyvem
