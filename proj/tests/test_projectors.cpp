#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polyvem/projectors.hpp"

using namespace polyvem;
using oracles::Rng;

TEST_CASE("divergence matrix on a k=0 triangle") {
  const PolygonalMesh mesh = mesh_from_polygons({{0, 0}, {1, 0}, {0.2, 0.9}}, {{0, 1, 2}});
  const ElementWorkspace ws = build_workspace(mesh, 0, 0);
  const Matrix Di = build_div_matrix(ws);
  REQUIRE(Di.rows() == 1);
  REQUIRE(Di.cols() == 3);

  // Constant fields are divergence free.
  const Vector const_dofs =
      dofs_H_row(ws, [](const Vector2&) { return Vector2(0.4, -1.1); });
  CHECK(std::abs((Di * const_dofs)(0)) < 1e-13);

  // tau = ((x-x_K)/h_K, 0) has divergence 1/h_K.
  const ElementGeometry& g = ws.geom;
  const Vector lin_dofs = dofs_H_row(ws, [&g](const Vector2& x) {
    return Vector2((x.x() - g.barycenter.x()) / g.diameter, 0.0);
  });
  CHECK((Di * lin_dofs)(0) == doctest::Approx(1.0 / g.diameter).epsilon(1e-12));

  // Divergence-theorem oracle on a general linear field.
  const Vector dofs = dofs_H_row(ws, [](const Vector2& x) {
    return Vector2(0.3 * x.x() - 0.2 * x.y() + 1.0, 0.7 * x.y() + 0.1 * x.x());
  });
  const double div_mean = (Di * dofs)(0);  // coefficient of the constant monomial
  double boundary_flux = 0.0;
  for (int e = 0; e < 3; ++e) {
    boundary_flux += integrate_on_edge(
        g.vertices[e], g.vertices[(e + 1) % 3],
        [&](const Vector2& x) {
          const Vector2 tau(0.3 * x.x() - 0.2 * x.y() + 1.0, 0.7 * x.y() + 0.1 * x.x());
          return tau.dot(g.edge_normal[e]);
        },
        3);
  }
  CHECK(div_mean * g.area == doctest::Approx(boundary_flux).epsilon(1e-12));
}

TEST_CASE("polynomial consistency of all projectors") {
  for (int k = 0; k <= 2; ++k) {
    CAPTURE(k);
    Rng rng(61 + k);
    const int m = monomial_space_dim(k);
    const int m1t = monomial_space_dim(k + 1);
    for (int trial = 0; trial < 5; ++trial) {
      const PolygonalMesh mesh = oracles::random_polygon(rng);
      const ElementWorkspace ws = build_workspace(mesh, 0, k);
      const ProjectorSet ps = build_projectors(ws);

      // Pbt recovers the coefficients of [P_k]^2 row fields.
      const Vector c1 = oracles::random_vector(rng, m);
      const Vector c2 = oracles::random_vector(rng, m);
      const Vector dofs = dofs_H_row(ws, oracles::vector_poly(ws.geom, k, c1, c2));
      Vector expected(2 * m);
      expected << c1, c2;
      CHECK((ps.Pbt * dofs - expected).cwiseAbs().maxCoeff() <
            1e-10 * expected.cwiseAbs().maxCoeff());

      // Rb recovers P_{k+1} coefficients; the constant recovers itself.
      const Vector cr = oracles::random_vector(rng, m1t);
      const Vector dv = dofs_V_scalar(ws, oracles::scalar_poly(ws.geom, k + 1, cr));
      CHECK((ps.Rb * dv - cr).cwiseAbs().maxCoeff() < 1e-10 * cr.cwiseAbs().maxCoeff());
      const Vector ones_dofs = dofs_V_scalar(ws, [](const Vector2&) { return 1.0; });
      Vector e0 = Vector::Zero(m1t);
      e0[0] = 1.0;
      CHECK((ps.Rb * ones_dofs - e0).cwiseAbs().maxCoeff() < 1e-12);

      // PU recovers P_k coefficients.
      const Vector cu = oracles::random_vector(rng, m);
      const Vector du = dofs_V_scalar(ws, oracles::scalar_poly(ws.geom, k, cu));
      CHECK((ps.PU * du - cu).cwiseAbs().maxCoeff() < 1e-10 * cu.cwiseAbs().maxCoeff());

      // PGU recovers gradients of [P_{k+1}]^2.
      const Vector g1 = oracles::random_vector(rng, m1t);
      const Vector g2 = oracles::random_vector(rng, m1t);
      const Vector dvv = dofs_V(ws, oracles::vector_poly(ws.geom, k + 1, g1, g2));
      const Matrix Dx = monomial_dx_matrix(ws.geom, k + 1);
      const Matrix Dy = monomial_dy_matrix(ws.geom, k + 1);
      Vector grad(4 * m);
      grad << (Dx * g1).head(m), (Dy * g1).head(m), (Dx * g2).head(m), (Dy * g2).head(m);
      CHECK((ps.PGU * dvv - grad).cwiseAbs().maxCoeff() <
            1e-10 * std::max(grad.cwiseAbs().maxCoeff(), 1e-12));

      // Gradient of a constant vanishes.
      const Vector dconst = dofs_V(ws, [](const Vector2&) { return Vector2(1.0, 1.0); });
      CHECK((ps.PGU * dconst).cwiseAbs().maxCoeff() < 1e-12);

      // Stabilization kernels.
      CHECK((ps.Ha * dofs).cwiseAbs().maxCoeff() < 1e-10 * dofs.cwiseAbs().maxCoeff());
      CHECK((ps.Hd * dv).cwiseAbs().maxCoeff() < 1e-10 * dv.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("Pb Kronecker block structure") {
  Rng rng(71);
  const PolygonalMesh mesh = oracles::random_polygon(rng);
  const ElementWorkspace ws = build_workspace(mesh, 0, 1);
  const ProjectorSet ps = build_projectors(ws);
  const int m = ws.dims.m, nH = ws.dims.nH;
  // Rows 2m..4m depend only on columns nH..2nH.
  CHECK(ps.Pb.block(0, nH, 2 * m, nH).norm() == 0.0);
  CHECK(ps.Pb.block(2 * m, 0, 2 * m, nH).norm() == 0.0);
  CHECK((ps.Pb.topLeftCorner(2 * m, nH) - ps.Pbt).norm() == 0.0);
  CHECK((ps.Pb.bottomRightCorner(2 * m, nH) - ps.Pbt).norm() == 0.0);
  // kron helper against a hand-rolled lift.
  const Matrix K = kron(Matrix::Identity(2, 2), ps.Pbt);
  CHECK((K - ps.Pb).norm() == 0.0);
}

TEST_CASE("projected gradient of the scaled coordinate") {
  Rng rng(73);
  const PolygonalMesh mesh = oracles::random_polygon(rng);
  const ElementWorkspace ws = build_workspace(mesh, 0, 1);
  const ProjectorSet ps = build_projectors(ws);
  const ElementGeometry& g = ws.geom;
  const Vector dofs = dofs_V(ws, [&g](const Vector2& x) {
    return Vector2((x.x() - g.barycenter.x()) / g.diameter, 0.0);
  });
  const Vector coeff = ps.PGU * dofs;
  // Gradient is the constant tensor (1/h_K) e1 (x) e1.
  Vector expected = Vector::Zero(4 * ws.dims.m);
  expected[0] = 1.0 / g.diameter;
  CHECK((coeff - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("R projection preserves boundary and volume averages") {
  Rng rng(79);
  // k=0: int_dK R(v) = int_dK v for the canonical basis.
  {
    const PolygonalMesh mesh = oracles::random_polygon(rng);
    const ElementWorkspace ws = build_workspace(mesh, 0, 0);
    const ProjectorSet ps = build_projectors(ws);
    const Vector dofs = oracles::random_vector(rng, ws.dims.nV);
    const Vector coeff = ps.Rb * dofs;
    // LHS: boundary integral of the projected polynomial via Me row 0.
    double lhs = 0.0;
    for (const EdgeWorkspace& ew : ws.edges) lhs += (ew.Me.row(0) * coeff)(0);
    // RHS: boundary integral of the piecewise-linear trace.
    double rhs = 0.0;
    for (const EdgeWorkspace& ew : ws.edges) rhs += ew.length * (ws.c0 * (ew.CL * dofs))(0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // k=1: int_K R(v) = int_K v (the first moment DOF).
  {
    const PolygonalMesh mesh = oracles::random_polygon(rng);
    const ElementWorkspace ws = build_workspace(mesh, 0, 1);
    const ProjectorSet ps = build_projectors(ws);
    const Vector dofs = oracles::random_vector(rng, ws.dims.nV);
    const Vector coeff = ps.Rb * dofs;
    double lhs = 0.0;
    for (int i = 0; i < coeff.size(); ++i) lhs += coeff[i] * ws.mono[i];
    CHECK(lhs == doctest::Approx(dofs[(ws.dims.k + 1) * ws.dims.d_K]).epsilon(1e-11));
  }
}

TEST_CASE("H-space DOFs of the identity tensor on a k=0 triangle") {
  const PolygonalMesh mesh = mesh_from_polygons({{0, 0}, {1, 0}, {0.2, 0.9}}, {{0, 1, 2}});
  const ElementWorkspace ws = build_workspace(mesh, 0, 0);
  const Vector dofs = dofs_H(ws, [](const Vector2&) { return Matrix2::Identity(); });
  for (int e = 0; e < 3; ++e) {
    const EdgeWorkspace& ew = ws.edges[e];
    CHECK(dofs[e] ==
          doctest::Approx(ew.sign * ew.length * ew.outward_normal.x()).epsilon(1e-13));
    CHECK(dofs[ws.dims.nH + e] ==
          doctest::Approx(ew.sign * ew.length * ew.outward_normal.y()).epsilon(1e-13));
  }
  const Vector zero = dofs_H(ws, [](const Vector2&) { return Matrix2::Zero(); });
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary traces follow the oriented Lagrange convention") {
  // Two meshes with the same polygon but relabeled nodes flip the canonical
  // orientation of the shared geometry; CL must keep returning values at
  // the same physical points, ordered from the local start vertex.
  const std::vector<Vector2> pts = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  const PolygonalMesh meshA = mesh_from_polygons(pts, {{0, 1, 2, 3}});
  // Reversing the node numbering flips the canonical orientation of all
  // four edges while keeping the same geometric traversal.
  const std::vector<Vector2> relabeled = {pts[3], pts[2], pts[1], pts[0]};
  const PolygonalMesh meshB = mesh_from_polygons(relabeled, {{3, 2, 1, 0}});

  auto v = [](const Vector2& x) { return 0.3 + x.x() * 1.7 - 0.9 * x.y() + x.x() * x.y(); };
  for (int k : {1, 2}) {
    const ElementWorkspace wsA = build_workspace(meshA, 0, k);
    const ElementWorkspace wsB = build_workspace(meshB, 0, k);
    const Vector dofsA = dofs_V_scalar(wsA, v);
    const Vector dofsB = dofs_V_scalar(wsB, v);
    // Same local traversal, same physical points: identical local DOFs.
    CHECK((dofsA - dofsB).cwiseAbs().maxCoeff() < 1e-14);
    for (int e = 0; e < 4; ++e) {
      const EdgeWorkspace& ewA = wsA.edges[e];
      const EdgeWorkspace& ewB = wsB.edges[e];
      CHECK(ewA.positive != ewB.positive);  // relabeling flips every edge
      // CL paired with the oriented nodes recovers point values of v.
      const Vector alphaA = ewA.CL * dofsA;
      const Vector alphaB = ewB.CL * dofsB;
      for (int j = 0; j < k + 2; ++j) {
        const double tA = lagrange_node(k, ewA.positive, j);
        const Vector2 pA = (1.0 - tA) * ewA.v1 + tA * ewA.v2;
        CHECK(alphaA[j] == doctest::Approx(v(pA)).epsilon(1e-13));
        const double tB = lagrange_node(k, ewB.positive, j);
        const Vector2 pB = (1.0 - tB) * ewB.v1 + tB * ewB.v2;
        CHECK(alphaB[j] == doctest::Approx(v(pB)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("divergence commutes on polynomial fields") {
  for (int k = 0; k <= 2; ++k) {
    Rng rng(83 + k);
    const PolygonalMesh mesh = oracles::random_polygon(rng);
    const ElementWorkspace ws = build_workspace(mesh, 0, k);
    const Matrix Di = build_div_matrix(ws);
    const int m = ws.dims.m;
    const Vector c1 = oracles::random_vector(rng, m);
    const Vector c2 = oracles::random_vector(rng, m);
    const Vector dofs = dofs_H_row(ws, oracles::vector_poly(ws.geom, k, c1, c2));
    const Vector div_coeff =
        (monomial_dx_matrix(ws.geom, k) * c1 + monomial_dy_matrix(ws.geom, k) * c2);
    CHECK((Di * dofs - div_coeff).cwiseAbs().maxCoeff() <
          1e-10 * std::max(div_coeff.cwiseAbs().maxCoeff(), 1e-12));
  }
}
