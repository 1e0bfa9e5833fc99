#pragma once

#include <functional>

#include "polyvem/linalg.hpp"

namespace polyvem {

struct ElementGeometry;  // mesh.hpp

/// Gauss-Legendre rule mapped to [0,1]: sum_i w_i f(t_i) = int_0^1 f.
struct GaussRule {
  Vector nodes;
  Vector weights;
};

/// n-point rule on [0,1], exact for polynomials of degree 2n-1. Nodes are
/// found by Newton iteration on the Legendre polynomials; rules are cached
/// per point count for the lifetime of the process.
const GaussRule& gauss_rule(int npoints);

/// Smallest point count whose rule is exact for the given polynomial degree.
inline int gauss_points_for(int degree) { return degree / 2 + 1; }

/// h_e * int_0^1 f((1-t) a + t b) dt with a rule exact for degree `order`.
template <class F>
double integrate_on_edge(const Vector2& a, const Vector2& b, F&& f, int order) {
  const GaussRule& rule = gauss_rule(gauss_points_for(order));
  const double h = (b - a).norm();
  double acc = 0.0;
  for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    acc += rule.weights[q] * f(Vector2((1.0 - t) * a + t * b));
  }
  return h * acc;
}

/// Integral over the triangle (a,b,c) by a collapsed tensor Gauss rule,
/// exact for total degree `order`.
template <class F>
double integrate_on_triangle(const Vector2& a, const Vector2& b, const Vector2& c,
                             F&& f, int order) {
  const GaussRule& ru = gauss_rule(gauss_points_for(order + 1));
  const GaussRule& rv = gauss_rule(gauss_points_for(order));
  const double jac = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ru.nodes.size(); ++i) {
    const double u = ru.nodes[i];
    double inner = 0.0;
    for (Eigen::Index j = 0; j < rv.nodes.size(); ++j) {
      const double v = rv.nodes[j] * (1.0 - u);
      inner += rv.weights[j] * f(Vector2(a + u * (b - a) + v * (c - a)));
    }
    acc += ru.weights[i] * (1.0 - u) * inner;
  }
  return jac * acc;
}

/// Integral over a polygonal element by fan triangulation from the centroid.
double integrate_on_element(const ElementGeometry& geom,
                            const std::function<double(const Vector2&)>& f,
                            int order);

/// Exact integrals int_K ((x-x_K)/h_K)^a ((y-y_K)/h_K)^b of all scaled
/// monomials of total degree <= max_degree, reduced to edge line integrals
/// by the divergence theorem. Indexed by the hierarchical monomial index.
Vector monomial_integrals(const ElementGeometry& geom, int max_degree);

/// Single scaled-monomial integral (convenience wrapper over the table).
double integrate_monomial(const ElementGeometry& geom, int alpha, int beta);

}  // namespace polyvem
