#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polyvem/kovasznay.hpp"
#include "polyvem/postprocess.hpp"

using namespace polyvem;
using oracles::Rng;

namespace {

const Rect kDomain{-0.5, 0.0, 1.5, 2.0};

ProblemParams kovasznay_params(const KovasznayCase& kc) {
  ProblemParams p;
  p.mu = kc.mu;
  p.f = [kc](const Vector2& x) { return kc.force(x); };
  p.g = [kc](const Vector2& x) { return kc.velocity(x); };
  return p;
}

}  // namespace

TEST_CASE("Kovasznay data") {
  const KovasznayCase kc = kovasznay_case(0.1);
  // lambda = 5 - sqrt(25 + 4 pi^2) by direct evaluation.
  CHECK(kc.lambda ==
        doctest::Approx(5.0 - std::sqrt(25.0 + 4.0 * M_PI * M_PI)).epsilon(1e-15));
  CHECK(kc.lambda == doctest::Approx(-3.0298).epsilon(1e-4));

  Rng rng(191);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector2 x(rng.uniform(kc.domain.x0, kc.domain.x1),
                    rng.uniform(kc.domain.y0, kc.domain.y1));
    // Stream-function construction: exactly divergence free.
    const Matrix2 g = kc.velocity_gradient(x);
    CHECK(std::abs(g.trace()) < 1e-10);
    // The gradient matches central differences.
    const double h = 1e-6;
    const Vector2 dx = (kc.velocity(x + Vector2(h, 0)) - kc.velocity(x - Vector2(h, 0))) / (2 * h);
    const Vector2 dy = (kc.velocity(x + Vector2(0, h)) - kc.velocity(x - Vector2(0, h))) / (2 * h);
    CHECK(std::abs(dx.x() - g(0, 0)) < 1e-6);
    CHECK(std::abs(dy.x() - g(0, 1)) < 1e-6);
    CHECK(std::abs(dx.y() - g(1, 0)) < 1e-6);
    CHECK(std::abs(dy.y() - g(1, 1)) < 1e-6);
  }
}

TEST_CASE("Kovasznay momentum residual vanishes") {
  const KovasznayCase kc = kovasznay_case(0.1);
  Rng rng(193);
  // Fourth-order stencils for the Laplacian and the pressure gradient.
  const double h = 1e-3;
  auto lap = [&](auto&& f, const Vector2& x) {
    return (-f(x + Vector2(2 * h, 0)) + 16.0 * f(x + Vector2(h, 0)) - 30.0 * f(x) +
            16.0 * f(x - Vector2(h, 0)) - f(x - Vector2(2 * h, 0))) /
               (12.0 * h * h) +
           (-f(x + Vector2(0, 2 * h)) + 16.0 * f(x + Vector2(0, h)) - 30.0 * f(x) +
            16.0 * f(x - Vector2(0, h)) - f(x - Vector2(0, 2 * h))) /
               (12.0 * h * h);
  };
  auto dpx = [&](const Vector2& x) {
    return (-kc.pressure(x + Vector2(2 * h, 0)) + 8.0 * kc.pressure(x + Vector2(h, 0)) -
            8.0 * kc.pressure(x - Vector2(h, 0)) + kc.pressure(x - Vector2(2 * h, 0))) /
           (12.0 * h);
  };
  auto dpy = [&](const Vector2& x) {
    return (-kc.pressure(x + Vector2(0, 2 * h)) + 8.0 * kc.pressure(x + Vector2(0, h)) -
            8.0 * kc.pressure(x - Vector2(0, h)) + kc.pressure(x - Vector2(0, 2 * h))) /
           (12.0 * h);
  };
  for (int trial = 0; trial < 25; ++trial) {
    const Vector2 x(rng.uniform(-0.3, 1.3), rng.uniform(0.2, 1.8));
    const Vector2 u = kc.velocity(x);
    const Matrix2 g = kc.velocity_gradient(x);
    const Vector2 lap_u(lap([&](const Vector2& p) { return kc.velocity(p).x(); }, x),
                        lap([&](const Vector2& p) { return kc.velocity(p).y(); }, x));
    const Vector2 residual = -kc.mu * lap_u + g * u + Vector2(dpx(x), dpy(x)) - kc.force(x);
    CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Kovasznay pressure has zero mean and the norm formula holds") {
  const KovasznayCase kc = kovasznay_case(0.1);
  const PolygonalMesh mesh = generate_mesh(MeshKind::Triangles, kc.domain, 0.2, 1);
  double p_mean = 0.0, u_norm2 = 0.0;
  for (int K = 0; K < mesh.element_count(); ++K) {
    const ElementGeometry g = element_geometry(mesh, K);
    p_mean += integrate_on_element(g, [&](const Vector2& x) { return kc.pressure(x); }, 10);
    u_norm2 += integrate_on_element(
        g, [&](const Vector2& x) { return kc.velocity(x).squaredNorm(); }, 10);
  }
  CHECK(std::abs(p_mean) < 1e-9);
  CHECK(u_norm2 == doctest::Approx(kc.velocity_norm2()).epsilon(1e-9));
}

TEST_CASE("zero state postprocesses to zero fields") {
  const PolygonalMesh mesh = generate_mesh(MeshKind::Triangles, kDomain, 0.8, 1);
  const KovasznayCase kc = kovasznay_case(0.1);
  const Assembler assembler(mesh, 1, kovasznay_params(kc));
  NewtonState state;
  state.x = Vector::Zero(assembler.system_size());
  const ComputableSolution sol = postprocess(assembler, state);
  CHECK(sol.c_hat == 0.0);
  for (const Vector& a : sol.aK) CHECK(a.norm() == 0.0);
  for (const Vector& b : sol.bK) CHECK(b.norm() == 0.0);
  const Assembler::ElementCache& c = assembler.elements()[0];
  CHECK(sol.p_hat(c, c.geom.barycenter, 0) == 0.0);

  // With a zero approximation every error reduces to the exact-field norm.
  const ErrorValues err = compute_errors(assembler, sol, kc.exact());
  double u_norm2 = 0.0;
  for (int K = 0; K < mesh.element_count(); ++K)
    u_norm2 += integrate_on_element(
        assembler.elements()[K].geom,
        [&](const Vector2& x) { return kc.velocity(x).squaredNorm(); }, 8);
  CHECK(err.e_u == doctest::Approx(std::sqrt(u_norm2)).epsilon(1e-8));
}

TEST_CASE("pressure formula identity at quadrature nodes") {
  const PolygonalMesh mesh = generate_mesh(MeshKind::DistortedHexagons, kDomain, 0.5, 2);
  const KovasznayCase kc = kovasznay_case(0.1);
  const Assembler assembler(mesh, 1, kovasznay_params(kc));
  const NewtonState state = newton_solve(assembler, 1e-6, 20);
  const ComputableSolution sol = postprocess(assembler, state);
  Rng rng(199);
  for (int K = 0; K < std::min(5, mesh.element_count()); ++K) {
    const Assembler::ElementCache& c = assembler.elements()[K];
    const Vector coeff = sol.pressure_coefficients(c, K);
    for (int trial = 0; trial < 4; ++trial) {
      // Points inside the element: blend the barycenter with a vertex.
      const double t = rng.uniform(0.0, 0.9);
      const Vector2 x =
          (1.0 - t) * c.geom.barycenter + t * c.geom.vertices[trial % c.geom.edge_count];
      const Matrix2 s = sol.sigma_hat(c, x, K);
      const Vector2 u = sol.u_hat(c, x, K);
      const double direct = -0.5 * (s.trace() + 2.0 * sol.c_hat + u.squaredNorm());
      CHECK(sol.p_hat(c, x, K) == doctest::Approx(direct).epsilon(1e-12));
      const double from_coeff = coeff.dot(eval_scaled_monomials(c.geom, 2 * sol.k, x));
      CHECK(from_coeff == doctest::Approx(direct).epsilon(1e-10));
    }
  }
  // The discrete pressure mean tends to zero; at this coarse level it is
  // already small relative to the norm.
  const auto [mean, norm] = pressure_mean_and_norm(assembler, sol);
  CHECK(std::abs(mean) / norm < 0.2);
}
