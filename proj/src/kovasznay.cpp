#include "polyvem/kovasznay.hpp"

#include <cmath>

namespace polyvem {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

KovasznayCase kovasznay_case(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("kovasznay_case: mu must be positive");
  KovasznayCase kc;
  kc.mu = mu;
  const double Re = 1.0 / mu;
  kc.lambda = 0.5 * Re - std::sqrt(0.25 * Re * Re + 4.0 * M_PI * M_PI);
  const double area = kc.domain.width() * kc.domain.height();
  kc.c = -0.5 * kc.velocity_norm2() / area;
  return kc;
}

double KovasznayCase::velocity_norm2() const {
  // int u1^2 = |Omega| + int e^{2lx} cos^2; the cross term vanishes over the
  // two full periods in y. int u2^2 = (l/2pi)^2 int e^{2lx} sin^2.
  const double E2 = (std::exp(3.0 * lambda) - std::exp(-lambda)) / (2.0 * lambda);
  const double area = domain.width() * domain.height();
  return area + E2 * (1.0 + lambda * lambda / (kTwoPi * kTwoPi));
}

Vector2 KovasznayCase::velocity(const Vector2& x) const {
  const double e = std::exp(lambda * x.x());
  return Vector2(1.0 - e * std::cos(kTwoPi * x.y()),
                 lambda / kTwoPi * e * std::sin(kTwoPi * x.y()));
}

Matrix2 KovasznayCase::velocity_gradient(const Vector2& x) const {
  const double e = std::exp(lambda * x.x());
  const double c = std::cos(kTwoPi * x.y());
  const double s = std::sin(kTwoPi * x.y());
  Matrix2 g;
  g(0, 0) = -lambda * e * c;
  g(0, 1) = kTwoPi * e * s;
  g(1, 0) = lambda * lambda / kTwoPi * e * s;
  g(1, 1) = lambda * e * c;
  return g;
}

double KovasznayCase::pressure(const Vector2& x) const {
  return 0.5 * std::exp(2.0 * lambda * x.x()) -
         (std::exp(3.0 * lambda) - std::exp(-lambda)) / (8.0 * lambda);
}

Vector2 KovasznayCase::force(const Vector2& x) const {
  return Vector2(2.0 * lambda * std::exp(2.0 * lambda * x.x()), 0.0);
}

Matrix2 KovasznayCase::pseudostress(const Vector2& x) const {
  const Vector2 u = velocity(x);
  Matrix2 s = mu * velocity_gradient(x) - u * u.transpose();
  const double pc = pressure(x) + c;
  s(0, 0) -= pc;
  s(1, 1) -= pc;
  return s;
}

ExactSolution KovasznayCase::exact() const {
  ExactSolution ex;
  ex.u = [*this](const Vector2& x) { return velocity(x); };
  ex.grad_u = [*this](const Vector2& x) { return velocity_gradient(x); };
  ex.p = [*this](const Vector2& x) { return pressure(x); };
  ex.sigma = [*this](const Vector2& x) { return pseudostress(x); };
  return ex;
}

}  // namespace polyvem
