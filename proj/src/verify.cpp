#include "polyvem/verify.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "polyvem/assembly.hpp"
#include "polyvem/convection.hpp"
#include "polyvem/local_operators.hpp"
#include "polyvem/postprocess.hpp"
#include "polyvem/projectors.hpp"
#include "polyvem/quadrature.hpp"

namespace polyvem {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  double uniform() {
    state = mix(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1); }
};

/// Random star-shaped polygon as a one-element mesh.
PolygonalMesh random_polygon(Rng& rng) {
  const int d = rng.integer(3, 8);
  const double scale = rng.uniform(0.4, 1.6);
  const Vector2 center(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
  std::vector<Vector2> pts(d);
  for (int i = 0; i < d; ++i) {
    const double angle = 2.0 * M_PI * (i + 0.35 * rng.uniform()) / d;
    const double radius = scale * rng.uniform(0.55, 1.0);
    pts[i] = center + radius * Vector2(std::cos(angle), std::sin(angle));
  }
  std::vector<int> poly(d);
  for (int i = 0; i < d; ++i) poly[i] = i;
  return mesh_from_polygons(std::move(pts), {poly});
}

Vector random_vector(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

ScalarField scalar_from_coeffs(const ElementGeometry& geom, int degree, Vector coeff) {
  return [&geom, degree, coeff = std::move(coeff)](const Vector2& x) {
    return coeff.dot(eval_scaled_monomials(geom, degree, x));
  };
}

VectorField vector_from_coeffs(const ElementGeometry& geom, int degree, Vector c1, Vector c2) {
  return [&geom, degree, c1 = std::move(c1), c2 = std::move(c2)](const Vector2& x) {
    const Vector phi = eval_scaled_monomials(geom, degree, x);
    return Vector2(c1.dot(phi), c2.dot(phi));
  };
}

double rel_inf_error(const Vector& got, const Vector& expected) {
  const double scale = std::max(expected.cwiseAbs().maxCoeff(), 1e-30);
  return (got - expected).cwiseAbs().maxCoeff() / scale;
}

CheckResult summarize(const std::string& name, bool pass, const std::ostringstream& msg) {
  return CheckResult{name, pass, msg.str()};
}

const Rect kDomain{-0.5, 0.0, 1.5, 2.0};

}  // namespace

CheckResult check_mesh_invariants() {
  std::ostringstream msg;
  bool pass = true;
  for (MeshKind kind :
       {MeshKind::Triangles, MeshKind::DistortedQuads, MeshKind::DistortedHexagons}) {
    int prev_elems = 0;
    for (double h : {0.25, 0.125}) {
      const PolygonalMesh mesh = generate_mesh(kind, kDomain, h, 7);
      const int euler = mesh.node_count() - mesh.edge_count() + mesh.element_count();
      if (euler != 1) {
        pass = false;
        msg << to_string(kind) << " h=" << h << ": Euler " << euler << " != 1; ";
      }
      double area = 0.0;
      for (int K = 0; K < mesh.element_count(); ++K) {
        const ElementGeometry g = element_geometry(mesh, K);
        area += g.area;
        if (g.diameter > 1.5 * h) {
          pass = false;
          msg << to_string(kind) << ": diameter " << g.diameter << " > 1.5h; ";
        }
        Vector2 closure = Vector2::Zero();
        for (int e = 0; e < g.edge_count; ++e) closure += g.edge_length[e] * g.edge_normal[e];
        if (closure.norm() > 1e-12 * g.diameter) {
          pass = false;
          msg << to_string(kind) << ": edge closure " << closure.norm() << "; ";
        }
        const MeshElement& elem = mesh.elements[K];
        for (std::size_t e = 0; e < elem.vertices.size(); ++e) {
          const int a = elem.vertices[e];
          const int b = elem.vertices[(e + 1) % elem.vertices.size()];
          if (elem.edge_positive[e] != (a < b)) {
            pass = false;
            msg << to_string(kind) << ": orientation flag mismatch; ";
          }
        }
      }
      if (std::abs(area - kDomain.width() * kDomain.height()) > 1e-10) {
        pass = false;
        msg << to_string(kind) << ": covered area " << area << "; ";
      }
      if (prev_elems > 0) {
        const double factor = static_cast<double>(mesh.element_count()) / prev_elems;
        if (factor < 3.5 || factor > 4.5) {
          pass = false;
          msg << to_string(kind) << ": refinement factor " << factor << "; ";
        }
      }
      prev_elems = mesh.element_count();
    }
  }
  if (pass) msg << "3 kinds x 2 sizes: Euler, coverage, closure, orientation, refinement factor";
  return summarize("mesh invariants", pass, msg);
}

CheckResult check_quadrature_consistency() {
  std::ostringstream msg;
  bool pass = true;
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const PolygonalMesh mesh = random_polygon(rng);
    const ElementGeometry geom = element_geometry(mesh, 0);
    const Vector table = monomial_integrals(geom, 6);
    for (int i = 0; i < table.size(); ++i) {
      const Exponents e = monomial_exponents(i);
      const double quad = integrate_on_element(
          geom, [&](const Vector2& x) { return eval_scaled_monomial(geom, i, x); }, e.a + e.b);
      const double rel = std::abs(quad - table[i]) / std::max(std::abs(table[i]), geom.area);
      worst = std::max(worst, rel);
    }
  }
  if (worst > 1e-11) {
    pass = false;
    msg << "divergence-theorem vs fan-quadrature mismatch " << worst << "; ";
  } else {
    msg << "50 random polygons, degrees <= 6, worst rel diff " << worst;
  }
  return summarize("quadrature consistency", pass, msg);
}

CheckResult check_projector_consistency() {
  std::ostringstream msg;
  bool pass = true;
  double worst = 0.0;
  for (int k = 0; k <= 2; ++k) {
    Rng rng(202 + k);
    const int m = monomial_space_dim(k);
    const int m1t = monomial_space_dim(k + 1);
    for (int poly = 0; poly < 20; ++poly) {
      const PolygonalMesh mesh = random_polygon(rng);
      const ElementWorkspace ws = build_workspace(mesh, 0, k);
      const ProjectorSet ps = build_projectors(ws);
      for (int field = 0; field < 20; ++field) {
        // Pbt on vector fields in [P_k]^2 (one tensor row).
        const Vector c1 = random_vector(rng, m), c2 = random_vector(rng, m);
        const Vector dofs = dofs_H_row(ws, vector_from_coeffs(ws.geom, k, c1, c2));
        Vector expected(2 * m);
        expected << c1, c2;
        worst = std::max(worst, rel_inf_error(ps.Pbt * dofs, expected));

        // Rb on P_{k+1}.
        const Vector cr = random_vector(rng, m1t);
        const Vector dv = dofs_V_scalar(ws, scalar_from_coeffs(ws.geom, k + 1, cr));
        worst = std::max(worst, rel_inf_error(ps.Rb * dv, cr));

        // PU on P_k.
        const Vector cu = random_vector(rng, m);
        const Vector dvu = dofs_V_scalar(ws, scalar_from_coeffs(ws.geom, k, cu));
        worst = std::max(worst, rel_inf_error(ps.PU * dvu, cu));

        // PGU on gradients of [P_{k+1}]^2.
        const Vector g1 = random_vector(rng, m1t), g2 = random_vector(rng, m1t);
        const Vector dvv = dofs_V(ws, vector_from_coeffs(ws.geom, k + 1, g1, g2));
        const Matrix Dx = monomial_dx_matrix(ws.geom, k + 1);
        const Matrix Dy = monomial_dy_matrix(ws.geom, k + 1);
        Vector grad(4 * m);
        grad << (Dx * g1).head(m), (Dy * g1).head(m), (Dx * g2).head(m), (Dy * g2).head(m);
        worst = std::max(worst, rel_inf_error(ps.PGU * dvv, grad));
      }
    }
  }
  if (worst > 1e-9) {
    pass = false;
    msg << "worst relative consistency residual " << worst << " > 1e-9";
  } else {
    msg << "k=0..2, 20 polygons x 20 fields each; worst residual " << worst;
  }
  return summarize("projector polynomial consistency", pass, msg);
}

CheckResult check_stabilization_kernels() {
  std::ostringstream msg;
  bool pass = true;
  double worst_kernel = 0.0, min_eig = 0.0;
  ProblemParams params;
  params.mu = 1.0;
  params.f = [](const Vector2&) { return Vector2::Zero(); };
  params.g = [](const Vector2&) { return Vector2::Zero(); };
  for (int k = 0; k <= 2; ++k) {
    Rng rng(303 + k);
    const int m = monomial_space_dim(k);
    const int m1t = monomial_space_dim(k + 1);
    for (int poly = 0; poly < 20; ++poly) {
      const PolygonalMesh mesh = random_polygon(rng);
      const ElementWorkspace ws = build_workspace(mesh, 0, k);
      const ProjectorSet ps = build_projectors(ws);
      for (int field = 0; field < 20; ++field) {
        const Vector c1 = random_vector(rng, m), c2 = random_vector(rng, m);
        const Vector dofs = dofs_H_row(ws, vector_from_coeffs(ws.geom, k, c1, c2));
        worst_kernel = std::max(worst_kernel, (ps.Ha * dofs).cwiseAbs().maxCoeff() /
                                                  std::max(dofs.cwiseAbs().maxCoeff(), 1e-30));
        const Vector cr = random_vector(rng, m1t);
        const Vector dv = dofs_V_scalar(ws, scalar_from_coeffs(ws.geom, k + 1, cr));
        worst_kernel = std::max(worst_kernel, (ps.Hd * dv).cwiseAbs().maxCoeff() /
                                                  std::max(dv.cwiseAbs().maxCoeff(), 1e-30));
      }
      Matrix Adev, Atr, Adiv, Asta, Dgra, Dsta, Dbou;
      Vector atra;
      build_H_operators(ps, ws, Adev, Atr, Adiv, Asta, atra);
      build_V_operators(ps, ws, Dgra, Dsta, Dbou);
      const double asta_min = Eigen::SelfAdjointEigenSolver<Matrix>(Asta).eigenvalues().minCoeff();
      const double dsta_min = Eigen::SelfAdjointEigenSolver<Matrix>(Dsta).eigenvalues().minCoeff();
      min_eig = std::min({min_eig, asta_min, dsta_min});
    }
  }
  if (worst_kernel > 1e-9) {
    pass = false;
    msg << "worst kernel residual " << worst_kernel << " > 1e-9; ";
  }
  if (min_eig < -1e-10) {
    pass = false;
    msg << "stabilization not PSD, min eigenvalue " << min_eig << "; ";
  }
  if (pass) msg << "kernel residual " << worst_kernel << ", min eigenvalue " << min_eig;
  return summarize("stabilization kernels", pass, msg);
}

CheckResult check_nullspace_residual() {
  std::ostringstream msg;
  bool pass = true;
  double worst = 0.0;
  for (MeshKind kind :
       {MeshKind::Triangles, MeshKind::DistortedQuads, MeshKind::DistortedHexagons}) {
    const PolygonalMesh mesh = generate_mesh(kind, kDomain, 0.4, 11);
    for (int k = 1; k <= 2; ++k) {
      for (int K = 0; K < mesh.element_count(); ++K) {
        const ElementWorkspace ws = build_workspace(mesh, K, k);
        worst = std::max(worst, (ws.Mo * ws.Ao).norm() / ws.Mo.norm());
      }
    }
  }
  if (worst > 1e-11) {
    pass = false;
    msg << "worst ||Mo Ao||_F / ||Mo||_F = " << worst << " > 1e-11";
  } else {
    msg << "3 kinds, k=1,2, every element; worst residual " << worst;
  }
  return summarize("rot-moment nullspace residual", pass, msg);
}

CheckResult check_gateaux_derivative() {
  std::ostringstream msg;
  bool pass = true;
  const double eps[3] = {1e-4, 1e-5, 1e-6};
  Rng rng(404);
  double worst_slope_err = 0.0;
  for (int state = 0; state < 10; ++state) {
    const int k = state % 3;
    const PolygonalMesh mesh = random_polygon(rng);
    const ElementWorkspace ws = build_workspace(mesh, 0, k);
    const ProjectorSet ps = build_projectors(ws);
    const int nH = ws.dims.nH, nV = ws.dims.nV;
    const Vector beta = random_vector(rng, 2 * nV);
    const Vector tau = random_vector(rng, 2 * nH);
    const Vector v = random_vector(rng, 2 * nV);
    const double kappa2 = 0.1;

    auto form = [&](const Vector& u) {
      const Vector gamma = projected_velocity_coeffs(ps.PU, u);
      const auto [Mz1, Mz2] = build_weighted_mass(ws, gamma);
      const ConvectionBlocks cb = build_convection(ps, ws, Mz1, Mz2, kappa2);
      return tau.dot(cb.G1 * u) + v.dot(cb.G2 * u);
    };
    const Vector gamma0 = projected_velocity_coeffs(ps.PU, beta);
    const auto [Mz1, Mz2] = build_weighted_mass(ws, gamma0);
    const ConvectionBlocks cb = build_convection(ps, ws, Mz1, Mz2, kappa2);
    const double f0 = form(beta);

    // Redraw directions whose quadratic remainder is too small to measure
    // above roundoff at the finest epsilon.
    Vector delta;
    double dg_form = 0.0, dev[3] = {0, 0, 0};
    for (int attempt = 0; attempt < 8; ++attempt) {
      delta = random_vector(rng, 2 * nV);
      dg_form = tau.dot(cb.DG1 * delta) + v.dot(cb.DG2 * delta);
      for (int i = 0; i < 3; ++i)
        dev[i] = std::abs((form(beta + eps[i] * delta) - f0) / eps[i] - dg_form);
      if (dev[2] > 1e-8 * std::max(1.0, std::abs(f0))) break;
    }
    // Least-squares slope of log(dev) vs log(eps).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
      const double lx = std::log(eps[i]);
      const double ly = std::log(std::max(dev[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    worst_slope_err = std::max(worst_slope_err, std::abs(slope - 1.0));
  }
  if (worst_slope_err > 0.1) {
    pass = false;
    msg << "worst |slope - 1| = " << worst_slope_err << " > 0.1";
  } else {
    msg << "10 random states, worst |slope - 1| = " << worst_slope_err;
  }
  return summarize("convection Gateaux derivative", pass, msg);
}

namespace {

PolygonalMesh two_triangle_square() {
  return mesh_from_polygons({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
}

double patch_test_worst_error(int k) {
  const PolygonalMesh mesh = two_triangle_square();
  const double mu = 1.0;

  ExactSolution exact;
  if (k == 1) {
    const Vector2 u0(0.7, -0.3);
    const double c = -0.5 * u0.squaredNorm();
    exact.u = [u0](const Vector2&) { return u0; };
    exact.grad_u = [](const Vector2&) { return Matrix2::Zero(); };
    exact.p = [](const Vector2& x) { return x.x() + 2.0 * x.y() - 1.5; };
    exact.sigma = [u0, c, p = exact.p](const Vector2& x) {
      Matrix2 s = -u0 * u0.transpose();
      const double pc = p(x) + c;
      s(0, 0) -= pc;
      s(1, 1) -= pc;
      return s;
    };
  } else {
    Matrix2 G;
    G << 0.5, 0.2, 0.4, -0.5;  // divergence-free linear velocity gradient
    const Vector2 u0(0.3, -0.1);
    exact.u = [G, u0](const Vector2& x) { return Vector2(u0 + G * x); };
    exact.grad_u = [G](const Vector2&) { return G; };
    exact.p = [](const Vector2& x) {
      return x.x() * x.x() + x.x() * x.y() - x.y() - 1.0 / 12.0;
    };
    // u quadratic norm over the unit square for the trace constant.
    const PolygonalMesh m2 = two_triangle_square();
    double unorm2 = 0.0;
    for (int K = 0; K < 2; ++K)
      unorm2 += integrate_on_element(
          element_geometry(m2, K), [&](const Vector2& x) { return exact.u(x).squaredNorm(); }, 6);
    const double c = -0.5 * unorm2;
    exact.sigma = [G, c, mu, u = exact.u, p = exact.p](const Vector2& x) {
      const Vector2 ux = u(x);
      Matrix2 s = mu * G - ux * ux.transpose();
      const double pc = p(x) + c;
      s(0, 0) -= pc;
      s(1, 1) -= pc;
      return s;
    };
  }

  ProblemParams params;
  params.mu = mu;
  params.kappa1 = params.kappa2 = params.kappa3 = 0.1;
  params.g = exact.u;
  if (k == 1) {
    params.f = [](const Vector2&) { return Vector2(1.0, 2.0); };
  } else {
    Matrix2 G;
    G << 0.5, 0.2, 0.4, -0.5;
    params.f = [G, u = exact.u](const Vector2& x) {
      return Vector2(G * u(x) + Vector2(2.0 * x.x() + x.y(), x.x() - 1.0));
    };
  }

  const Assembler assembler(mesh, k, params);
  const NewtonState state = newton_solve(assembler, 1e-11, 30);
  const ComputableSolution sol = postprocess(assembler, state);
  const ErrorValues err = compute_errors(assembler, sol, exact);

  // Reference norms for relative errors.
  ErrorValues norms;
  {
    ComputableSolution zero = sol;
    for (auto& a : zero.aK) a.setZero();
    for (auto& b : zero.bK) b.setZero();
    zero.c_hat = 0.0;
    norms = compute_errors(assembler, zero, exact);
  }
  double worst = err.e_sigma / norms.e_sigma;
  worst = std::max(worst, err.e_u / norms.e_u);
  worst = std::max(worst, err.e_uH1 / norms.e_uH1);
  worst = std::max(worst, err.e_p / norms.e_p);
  return worst;
}

}  // namespace

CheckResult check_patch_test() {
  std::ostringstream msg;
  bool pass = true;
  for (int k : {1, 2}) {
    const double worst = patch_test_worst_error(k);
    if (worst > 1e-7) {
      pass = false;
      msg << "k=" << k << ": worst relative error " << worst << " > 1e-7; ";
    } else {
      msg << "k=" << k << " worst rel err " << worst << "; ";
    }
  }
  return summarize("polynomial patch test", pass, msg);
}

CheckResult check_dof_count() {
  std::ostringstream msg;
  bool pass = true;
  {
    const PolygonalMesh square = mesh_from_polygons({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
    const DofMap map = build_dof_map(square, 0);
    if (map.N != 17) {
      pass = false;
      msg << "single square k=0: N=" << map.N << " != 17; ";
    }
  }
  for (MeshKind kind :
       {MeshKind::Triangles, MeshKind::DistortedQuads, MeshKind::DistortedHexagons}) {
    const PolygonalMesh mesh = generate_mesh(kind, kDomain, 0.3, 5);
    for (int k = 0; k <= 2; ++k) {
      const DofMap map = build_dof_map(mesh, k);
      const int m = monomial_space_dim(k);
      const int m0 = k * (k + 1) / 2;
      const int expected = 2 * (k + 1) * mesh.edge_count() + 2 * (m - 1 + m0) * mesh.element_count() +
                           2 * mesh.node_count() + 2 * k * mesh.edge_count() +
                           2 * m0 * mesh.element_count() + 1;
      if (map.N != expected) {
        pass = false;
        msg << to_string(kind) << " k=" << k << ": N=" << map.N << " != " << expected << "; ";
      }
      std::vector<bool> hit(map.N, false);
      for (int K = 0; K < mesh.element_count(); ++K) {
        for (Eigen::Index i = 0; i < map.uH[K].size(); ++i) hit[map.uH[K][i]] = true;
        for (Eigen::Index i = 0; i < map.uV[K].size(); ++i) hit[map.uV[K][i]] = true;
      }
      for (int i = 0; i + 1 < map.N; ++i)
        if (!hit[i]) {
          pass = false;
          msg << to_string(kind) << " k=" << k << ": index " << i << " never hit; ";
          break;
        }
    }
  }
  if (pass) msg << "formula and coverage hold on 3 kinds x k=0..2 plus the unit square";
  return summarize("DOF-count formula", pass, msg);
}

std::vector<CheckResult> run_property_suite() {
  return {check_mesh_invariants(),      check_quadrature_consistency(),
          check_projector_consistency(), check_stabilization_kernels(),
          check_nullspace_residual(),    check_gateaux_derivative(),
          check_patch_test(),            check_dof_count()};
}

}  // namespace polyvem
