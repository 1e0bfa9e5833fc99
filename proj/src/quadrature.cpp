#include "polyvem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "polyvem/basis.hpp"
#include "polyvem/mesh.hpp"

namespace polyvem {

namespace {

// Legendre nodes on (-1,1) by Newton iteration, then mapped to [0,1].
GaussRule make_gauss_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: need at least one point");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int npoints) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(npoints);
  if (it == cache.end()) it = cache.emplace(npoints, make_gauss_rule(npoints)).first;
  return it->second;
}

double integrate_on_element(const ElementGeometry& geom,
                            const std::function<double(const Vector2&)>& f,
                            int order) {
  double acc = 0.0;
  const int d = geom.edge_count;
  for (int e = 0; e < d; ++e) {
    const Vector2& a = geom.vertices[e];
    const Vector2& b = geom.vertices[(e + 1) % d];
    acc += integrate_on_triangle(geom.barycenter, a, b, f, order);
  }
  return acc;
}

Vector monomial_integrals(const ElementGeometry& geom, int max_degree) {
  const int dim = monomial_space_dim(max_degree);
  Vector result = Vector::Zero(dim);
  // int_K phi_(a,b) = h_K/(a+b+2) * sum_e int_e phi_(a,b) [sx n1 + sy n2],
  // with sx = (x-x_K)/h_K, sy = (y-y_K)/h_K; the edge integrand has degree
  // a+b+1 along the edge.
  const GaussRule& rule = gauss_rule(gauss_points_for(max_degree + 1));
  const int d = geom.edge_count;
  for (int e = 0; e < d; ++e) {
    const Vector2& a = geom.vertices[e];
    const Vector2& b = geom.vertices[(e + 1) % d];
    const Vector2& nrm = geom.edge_normal[e];
    const double he = geom.edge_length[e];
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double t = rule.nodes[q];
      const Vector2 x = (1.0 - t) * a + t * b;
      const Vector values = eval_scaled_monomials(geom, max_degree, x);
      const double sx = (x.x() - geom.barycenter.x()) / geom.diameter;
      const double sy = (x.y() - geom.barycenter.y()) / geom.diameter;
      const double flux = sx * nrm.x() + sy * nrm.y();
      result += (rule.weights[q] * he * flux) * values;
    }
  }
  for (int i = 0; i < dim; ++i) {
    const Exponents ex = monomial_exponents(i);
    result[i] *= geom.diameter / (ex.a + ex.b + 2);
  }
  return result;
}

double integrate_monomial(const ElementGeometry& geom, int alpha, int beta) {
  return monomial_integrals(geom, alpha + beta)[monomial_index(alpha, beta)];
}

}  // namespace polyvem
