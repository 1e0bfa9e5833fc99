#include "polyvem/convection.hpp"

namespace polyvem {

Vector projected_velocity_coeffs(const Matrix& PU, const Vector& beta) {
  const int nV = static_cast<int>(PU.cols());
  const int m = static_cast<int>(PU.rows());
  Vector gamma(2 * m);
  gamma.head(m) = PU * beta.head(nV);
  gamma.tail(m) = PU * beta.tail(nV);
  return gamma;
}

std::pair<Matrix, Matrix> build_weighted_mass(const SpaceDims& dims, const Vector& mono,
                                              const Vector& gamma) {
  const int m = dims.m;
  Matrix Mz1 = Matrix::Zero(m, m);
  Matrix Mz2 = Matrix::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    const double g1 = gamma[r];
    const double g2 = gamma[m + r];
    if (g1 == 0.0 && g2 == 0.0) continue;
    const Exponents er = monomial_exponents(r);
    for (int i = 0; i < m; ++i) {
      const Exponents ei = monomial_exponents(i);
      for (int j = i; j < m; ++j) {
        const Exponents ej = monomial_exponents(j);
        const double t = mono[monomial_index(er.a + ei.a + ej.a, er.b + ei.b + ej.b)];
        Mz1(i, j) += g1 * t;
        Mz2(i, j) += g2 * t;
        if (j != i) {
          Mz1(j, i) += g1 * t;
          Mz2(j, i) += g2 * t;
        }
      }
    }
  }
  return {std::move(Mz1), std::move(Mz2)};
}

Matrix mdpu_pattern_1() {
  Matrix P(4, 2);
  P << 0.5, 0,
       0, 0,
       0, 1,
       -0.5, 0;
  return P;
}

Matrix mdpu_pattern_2() {
  Matrix P(4, 2);
  P << 0, -0.5,
       1, 0,
       0, 0,
       0, 0.5;
  return P;
}

Matrix build_mdpu(const Matrix& Mz1, const Matrix& Mz2, const Matrix& PU) {
  return kron(mdpu_pattern_1(), Mz1 * PU) + kron(mdpu_pattern_2(), Mz2 * PU);
}

Matrix symmetrizer(int m) {
  Matrix T = Matrix::Zero(4, 4);
  T(0, 0) = T(1, 2) = T(2, 1) = T(3, 3) = 1.0;
  return Matrix::Identity(4 * m, 4 * m) + kron(T, Matrix::Identity(m, m));
}

ConvectionBlocks build_convection(const ProjectorSet& ps, const ElementWorkspace& ws,
                                  const Matrix& Mz1, const Matrix& Mz2, double kappa2) {
  ConvectionBlocks cb;
  cb.Mz1 = Mz1;
  cb.Mz2 = Mz2;
  cb.MdPU = build_mdpu(Mz1, Mz2, ps.PU);
  const Matrix sym_MdPU = symmetrizer(ws.dims.m) * cb.MdPU;
  cb.G1 = ps.Pb.transpose() * cb.MdPU;
  cb.G2 = -kappa2 * ps.PGU.transpose() * cb.MdPU;
  cb.DG1 = ps.Pb.transpose() * sym_MdPU;
  cb.DG2 = -kappa2 * ps.PGU.transpose() * sym_MdPU;
  return cb;
}

}  // namespace polyvem
