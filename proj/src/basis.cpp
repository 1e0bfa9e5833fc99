#include "polyvem/basis.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "polyvem/mesh.hpp"
#include "polyvem/quadrature.hpp"

namespace polyvem {

Exponents monomial_exponents(int index) {
  if (index < 0) throw std::out_of_range("monomial_exponents: negative index");
  int d = 0;
  while (monomial_space_dim(d) <= index) ++d;
  const int b = monomial_space_dim(d) - 1 - index;
  return Exponents{d - b, b};
}

Vector eval_scaled_monomials(const ElementGeometry& geom, int degree, const Vector2& x) {
  const double sx = (x.x() - geom.barycenter.x()) / geom.diameter;
  const double sy = (x.y() - geom.barycenter.y()) / geom.diameter;
  Vector values(monomial_space_dim(degree));
  values[0] = 1.0;
  // Degree level l occupies indices dim(l-1)..dim(l)-1 ordered by descending
  // y-exponent: (0,l), (1,l-1), ..., (l,0); each entry comes from the
  // previous level by one running multiplication.
  int prev_begin = 0;
  for (int l = 1; l <= degree; ++l) {
    const int begin = monomial_space_dim(l - 1);
    values[begin] = values[prev_begin] * sy;  // (0,l) from (0,l-1)
    for (int a = 1; a <= l; ++a)
      values[begin + a] = values[prev_begin + a - 1] * sx;  // (a,b) from (a-1,b)
    prev_begin = begin;
  }
  return values;
}

Matrix eval_scaled_monomial_gradients(const ElementGeometry& geom, int degree, const Vector2& x) {
  const int dim = monomial_space_dim(degree);
  const Vector values = eval_scaled_monomials(geom, degree, x);
  Matrix grads = Matrix::Zero(dim, 2);
  const double inv_h = 1.0 / geom.diameter;
  for (int i = 1; i < dim; ++i) {
    const Exponents e = monomial_exponents(i);
    if (e.a > 0) grads(i, 0) = e.a * inv_h * values[monomial_index(e.a - 1, e.b)];
    if (e.b > 0) grads(i, 1) = e.b * inv_h * values[monomial_index(e.a, e.b - 1)];
  }
  return grads;
}

Matrix monomial_dx_matrix(const ElementGeometry& geom, int degree) {
  const int dim = monomial_space_dim(degree);
  Matrix D = Matrix::Zero(dim, dim);
  for (int i = 1; i < dim; ++i) {
    const Exponents e = monomial_exponents(i);
    if (e.a > 0) D(monomial_index(e.a - 1, e.b), i) = e.a / geom.diameter;
  }
  return D;
}

Matrix monomial_dy_matrix(const ElementGeometry& geom, int degree) {
  const int dim = monomial_space_dim(degree);
  Matrix D = Matrix::Zero(dim, dim);
  for (int i = 1; i < dim; ++i) {
    const Exponents e = monomial_exponents(i);
    if (e.b > 0) D(monomial_index(e.a, e.b - 1), i) = e.b / geom.diameter;
  }
  return D;
}

Vector monomial_coeff_product(const Vector& c1, int deg1, const Vector& c2, int deg2) {
  Vector out = Vector::Zero(monomial_space_dim(deg1 + deg2));
  for (int i = 0; i < c1.size(); ++i) {
    if (c1[i] == 0.0) continue;
    const Exponents ei = monomial_exponents(i);
    for (int j = 0; j < c2.size(); ++j) {
      if (c2[j] == 0.0) continue;
      const Exponents ej = monomial_exponents(j);
      out[monomial_index(ei.a + ej.a, ei.b + ej.b)] += c1[i] * c2[j];
    }
  }
  return out;
}

Vector eval_lagrange(int k, bool positive, double t) {
  const int n = k + 2;
  Vector values(n);
  for (int i = 0; i < n; ++i) {
    const double ti = lagrange_node(k, positive, i);
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double tj = lagrange_node(k, positive, j);
      prod *= (t - tj) / (ti - tj);
    }
    values[i] = prod;
  }
  return values;
}

namespace {

EdgeReference make_edge_reference(int k) {
  EdgeReference ref;
  ref.k = k;
  const int n = k + 1;
  ref.Mk_hat.resize(n, n);
  // int_0^1 (t-1/2)^(i+j) dt, zero for odd i+j.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int p = i + j;
      ref.Mk_hat(i, j) = (p % 2 == 0) ? std::pow(0.5, p) / (p + 1) : 0.0;
    }
  ref.Mk_hat_inv = ref.Mk_hat.inverse();

  const GaussRule& rule = gauss_rule(gauss_points_for(2 * k + 3));
  ref.MCB_hat_pos = Matrix::Zero(k + 2, k + 1);
  ref.MCB_hat_neg = Matrix::Zero(k + 2, k + 1);
  ref.MassL_hat = Matrix::Zero(k + 2, k + 2);
  ref.c0 = RowVector::Zero(k + 2);
  for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    const double w = rule.weights[q];
    const Vector Lpos = eval_lagrange(k, true, t);
    const Vector Lneg = eval_lagrange(k, false, t);
    Vector phi(k + 1);
    double run = 1.0;
    for (int i = 0; i <= k; ++i) {
      phi[i] = run;
      run *= (t - 0.5);
    }
    ref.MCB_hat_pos += w * Lpos * phi.transpose();
    ref.MCB_hat_neg += w * Lneg * phi.transpose();
    ref.MassL_hat += w * Lpos * Lpos.transpose();
    ref.c0 += w * Lpos.transpose();
  }
  return ref;
}

}  // namespace

const EdgeReference& edge_reference(int k) {
  static std::map<int, EdgeReference> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, make_edge_reference(k)).first;
  return it->second;
}

}  // namespace polyvem
