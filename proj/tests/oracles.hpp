#pragma once

// Test-only helpers: independent quadrature oracles and random generators
// used to pin expected values. Nothing here reuses the projector or
// operator construction paths under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include "polyvem/mesh.hpp"
#include "polyvem/projectors.hpp"
#include "polyvem/quadrature.hpp"

namespace oracles {

using namespace polyvem;

inline std::uint64_t mix(std::uint64_t x) {
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
  int integer(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
  }
};

inline PolygonalMesh random_polygon(Rng& rng, int min_sides = 3, int max_sides = 8) {
  const int d = rng.integer(min_sides, max_sides);
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

inline Vector random_vector(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

inline ScalarField scalar_poly(const ElementGeometry& geom, int degree, Vector coeff) {
  return [&geom, degree, coeff = std::move(coeff)](const Vector2& x) {
    return coeff.dot(eval_scaled_monomials(geom, degree, x));
  };
}

inline VectorField vector_poly(const ElementGeometry& geom, int degree, Vector c1, Vector c2) {
  return [&geom, degree, c1 = std::move(c1), c2 = std::move(c2)](const Vector2& x) {
    const Vector phi = eval_scaled_monomials(geom, degree, x);
    return Vector2(c1.dot(phi), c2.dot(phi));
  };
}

/// Tensor field with polynomial rows.
inline TensorField tensor_poly(const ElementGeometry& geom, int degree, Vector c11, Vector c12,
                               Vector c21, Vector c22) {
  return [&geom, degree, c11 = std::move(c11), c12 = std::move(c12), c21 = std::move(c21),
          c22 = std::move(c22)](const Vector2& x) {
    const Vector phi = eval_scaled_monomials(geom, degree, x);
    Matrix2 t;
    t << c11.dot(phi), c12.dot(phi), c21.dot(phi), c22.dot(phi);
    return t;
  };
}

inline Matrix2 dev(const Matrix2& t) {
  Matrix2 d = t;
  const double half_tr = 0.5 * t.trace();
  d(0, 0) -= half_tr;
  d(1, 1) -= half_tr;
  return d;
}

/// Analytic gradient of a monomial-coefficient polynomial.
inline Matrix2 poly_gradient(const ElementGeometry& geom, int degree, const Vector& c1,
                             const Vector& c2, const Vector2& x) {
  const Matrix grads = eval_scaled_monomial_gradients(geom, degree, x);
  Matrix2 g;
  g.row(0) = c1.transpose() * grads;
  g.row(1) = c2.transpose() * grads;
  return g;
}

inline double rel_err(double got, double expected, double floor = 1e-12) {
  return std::abs(got - expected) / std::max(std::abs(expected), floor);
}

}  // namespace oracles
