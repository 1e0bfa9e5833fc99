#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polyvem/quadrature.hpp"

using namespace polyvem;

namespace {

PolygonalMesh unit_square_mesh() {
  return mesh_from_polygons({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
}

}  // namespace

TEST_CASE("gauss rules integrate monomials exactly") {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule& rule = gauss_rule(n);
    REQUIRE(rule.nodes.size() == n);
    CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double acc = 0.0;
      for (int q = 0; q < n; ++q) acc += rule.weights[q] * std::pow(rule.nodes[q], p);
      CHECK(acc == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("edge integrals") {
  const Vector2 a(0, 0), b(1, 0);
  CHECK(integrate_on_edge(a, b, [](const Vector2&) { return 1.0; }, 1) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate_on_edge(a, b, [](const Vector2& x) { return x.x() * x.x(); }, 2) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // Odd linear integrand about the midpoint of a slanted edge.
  const double odd =
      integrate_on_edge(Vector2(1, 2), Vector2(3, 5),
                        [](const Vector2& x) { return x.x() - 2.0; }, 3);
  CHECK(std::abs(odd) < 1e-14);
  // h_e scaling on a slanted edge.
  CHECK(integrate_on_edge(Vector2(0, 0), Vector2(3, 4), [](const Vector2&) { return 1.0; }, 0) ==
        doctest::Approx(5.0));
}

TEST_CASE("element quadrature on the unit square") {
  const PolygonalMesh mesh = unit_square_mesh();
  const ElementGeometry geom = element_geometry(mesh, 0);
  CHECK(integrate_on_element(geom, [](const Vector2&) { return 1.0; }, 0) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(integrate_on_element(geom, [](const Vector2& x) { return std::exp(x.x()); }, 12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("monomial integrals via the divergence theorem") {
  const PolygonalMesh mesh = unit_square_mesh();
  const ElementGeometry geom = element_geometry(mesh, 0);
  CHECK(integrate_monomial(geom, 0, 0) == doctest::Approx(geom.area).epsilon(1e-14));
  // First moments about the area centroid vanish.
  CHECK(std::abs(integrate_monomial(geom, 1, 0)) < 1e-15);
  CHECK(std::abs(integrate_monomial(geom, 0, 1)) < 1e-15);
  // int ((x-1/2)/sqrt(2))^2 over the unit square = (1/12)/2.
  CHECK(integrate_monomial(geom, 2, 0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("divergence theorem agrees with fan quadrature on random polygons") {
  oracles::Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const PolygonalMesh mesh = oracles::random_polygon(rng);
    const ElementGeometry geom = element_geometry(mesh, 0);
    const Vector table = monomial_integrals(geom, 6);
    for (int i = 0; i < table.size(); ++i) {
      const Exponents e = monomial_exponents(i);
      const double quad = integrate_on_element(
          geom, [&](const Vector2& x) { return eval_scaled_monomial(geom, i, x); }, e.a + e.b);
      worst = std::max(worst, std::abs(quad - table[i]) / std::max(std::abs(table[i]), geom.area));
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("products of monomials integrate consistently") {
  oracles::Rng rng(7);
  const PolygonalMesh mesh = oracles::random_polygon(rng);
  const ElementGeometry geom = element_geometry(mesh, 0);
  const int k = 2;
  const Vector table = monomial_integrals(geom, 2 * k);
  const int m = monomial_space_dim(k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Exponents ei = monomial_exponents(i), ej = monomial_exponents(j);
      const double direct = integrate_on_element(
          geom,
          [&](const Vector2& x) {
            return eval_scaled_monomial(geom, i, x) * eval_scaled_monomial(geom, j, x);
          },
          2 * k + 2);
      // Entries can be tiny; compare against the element scale.
      const double diff = std::abs(direct - table[monomial_index(ei.a + ej.a, ei.b + ej.b)]);
      CHECK(diff < 1e-12 * geom.area);
    }
}
