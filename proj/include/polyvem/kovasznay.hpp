#pragma once

#include "polyvem/postprocess.hpp"

namespace polyvem {

/// Kovasznay flow on (-0.5,1.5)x(0,2) driving the convergence benchmark:
/// u = (1 - e^{lx} cos 2 pi y, (l/2pi) e^{lx} sin 2 pi y) with
/// l = Re/2 - sqrt(Re^2/4 + 4 pi^2), Re = 1/mu, and
/// p = e^{2lx}/2 - (e^{3l} - e^{-l})/(8l) (mean zero on this domain).
/// The body force reduces to f = (2 l e^{2lx}, 0).
struct KovasznayCase {
  double mu = 0.1;
  double lambda = 0.0;
  double c = 0.0;  // pseudostress constant -||u||^2 / (2 |Omega|)
  Rect domain{-0.5, 0.0, 1.5, 2.0};

  Vector2 velocity(const Vector2& x) const;
  Matrix2 velocity_gradient(const Vector2& x) const;
  double pressure(const Vector2& x) const;
  Vector2 force(const Vector2& x) const;
  Matrix2 pseudostress(const Vector2& x) const;

  ExactSolution exact() const;
  double velocity_norm2() const;  // ||u||_{0,Omega}^2, closed form
};

KovasznayCase kovasznay_case(double mu);

}  // namespace polyvem
