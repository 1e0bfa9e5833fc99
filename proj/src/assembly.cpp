#include "polyvem/assembly.hpp"

#include <Eigen/SparseLU>
#include <sstream>
#include <stdexcept>

namespace polyvem {

DofMap build_dof_map(const PolygonalMesh& mesh, int k) {
  const int nE = mesh.edge_count();
  const int nN = mesh.node_count();
  const int nK = mesh.element_count();
  const int mH = monomial_space_dim(k) - 1 + k * (k + 1) / 2;
  const int mV = k * (k + 1) / 2;
  const int w0 = nE * 2 * (k + 1) + nK * 2 * mH;

  DofMap map;
  map.N = w0 + 2 * nN + 2 * k * nE + 2 * mV * nK + 1;
  map.xi_index = map.N - 1;
  map.uH.resize(nK);
  map.uV.resize(nK);

  for (int K = 0; K < nK; ++K) {
    const MeshElement& elem = mesh.elements[K];
    const int d_K = static_cast<int>(elem.vertices.size());
    const int nH = (k + 1) * d_K + mH;
    const int nV = (k + 1) * d_K + mV;
    IndexVector pH(nH), qH(nH), pV(nV), qV(nV);

    for (int e = 0; e < d_K; ++e) {
      const int Ie = elem.edges[e];
      int w = Ie * 2 * (k + 1);
      for (int r = 0; r <= k; ++r) {
        const int i = e * (k + 1) + r;
        pH[i] = w + r;
        qH[i] = w + (k + 1) + r;
      }

      const int In = elem.vertices[e];
      pV[e] = w0 + 2 * In;
      qV[e] = w0 + 2 * In + 1;

      w = w0 + 2 * nN + Ie * 2 * k;
      // Edge-interior velocity values are stored globally in canonical edge
      // order; elements traversing the edge backwards index them reversed.
      for (int r = 0; r < k; ++r) {
        const int i = d_K + e * k + r;
        const int slot = elem.edge_positive[e] ? r : (k - 1 - r);
        pV[i] = w + slot;
        qV[i] = w + k + slot;
      }
    }

    const int wH = nE * 2 * (k + 1) + K * 2 * mH;
    for (int r = 0; r < mH; ++r) {
      pH[(k + 1) * d_K + r] = wH + r;
      qH[(k + 1) * d_K + r] = wH + mH + r;
    }
    const int wV = w0 + 2 * nN + 2 * k * nE + K * 2 * mV;
    for (int r = 0; r < mV; ++r) {
      pV[(k + 1) * d_K + r] = wV + r;
      qV[(k + 1) * d_K + r] = wV + mV + r;
    }

    map.uH[K].resize(2 * nH);
    map.uH[K] << pH, qH;
    map.uV[K].resize(2 * nV);
    map.uV[K] << pV, qV;
  }
  return map;
}

Assembler::Assembler(const PolygonalMesh& mesh, int k, const ProblemParams& params)
    : mesh_(&mesh), k_(k), params_(params) {
  params_.validate();
  dofmap_ = build_dof_map(mesh, k);
  cache_.resize(mesh.element_count());
  for (int K = 0; K < mesh.element_count(); ++K) {
    ElementCache& c = cache_[K];
    ElementWorkspace ws;
    try {
      ws = build_workspace(mesh, K, k);
    } catch (const std::exception& err) {
      throw std::runtime_error("assembler: element " + std::to_string(K) + ": " + err.what());
    }
    const ProjectorSet ps = build_projectors(ws);
    const LocalOperators ops = build_local_operators(ps, ws, params_);
    c.geom = ws.geom;
    c.dims = ws.dims;
    c.Mass = ws.Mass;
    c.PU = ps.PU;
    c.PbT = ps.Pb.transpose();
    c.PGUT = ps.PGU.transpose();
    c.KHH = ops.Adev + ops.Asta + params_.kappa1 * ops.Adiv;
    c.KHV = params_.mu * ops.B;
    c.KVH = -params_.mu * ops.B.transpose() - params_.kappa2 * ops.C;
    c.KVV = params_.kappa2 * params_.mu * ops.Dgra + ops.Dsta + params_.kappa3 * ops.Dbou;
    c.atra = ops.atra;
    c.bH = params_.mu * ops.b1 - params_.kappa1 * ops.b2;
    c.bV = params_.kappa3 * ops.b3 + params_.mu * ops.b4;
    c.mono = ws.mono;
    domain_area_ += ws.geom.area;

    // DOFs of the identity tensor: conforming across edges, so the scatter
    // writes consistent values.
    const Vector id_dofs = dofs_H(ws, [](const Vector2&) { return Matrix2::Identity(); });
    if (kernel_.size() == 0) {
      kernel_ = Vector::Zero(dofmap_.N);
      trace_ = Vector::Zero(dofmap_.N);
    }
    for (Eigen::Index i = 0; i < id_dofs.size(); ++i) kernel_[dofmap_.uH[K][i]] = id_dofs[i];
    for (Eigen::Index i = 0; i < c.atra.size(); ++i) trace_[dofmap_.uH[K][i]] += c.atra[i];
  }
}

GlobalSystem Assembler::assemble(const Vector& x) const {
  const int N = dofmap_.N;
  const bool zero_iterate = (x.size() == 0);
  if (!zero_iterate && x.size() != N)
    throw std::invalid_argument("assemble: iterate has wrong length");

  std::vector<Triplet> tDA, tA;
  std::size_t estimate = 1;
  for (int K = 0; K < mesh_->element_count(); ++K) {
    const auto nh = dofmap_.uH[K].size();
    const auto nv = dofmap_.uV[K].size();
    estimate += static_cast<std::size_t>((nh + nv) * (nh + nv) + 2 * nh);
  }
  tDA.reserve(estimate);
  tA.reserve(estimate);

  Vector b = Vector::Zero(N);
  auto scatter = [](std::vector<Triplet>& out, const IndexVector& rows,
                    const IndexVector& cols, const Matrix& block) {
    for (Eigen::Index i = 0; i < rows.size(); ++i)
      for (Eigen::Index j = 0; j < cols.size(); ++j)
        out.emplace_back(rows[i], cols[j], block(i, j));
  };

  for (int K = 0; K < mesh_->element_count(); ++K) {
    const ElementCache& c = cache_[K];
    const IndexVector& uH = dofmap_.uH[K];
    const IndexVector& uV = dofmap_.uV[K];

    scatter(tDA, uH, uH, c.KHH);
    scatter(tA, uH, uH, c.KHH);
    scatter(tDA, uV, uH, c.KVH);
    scatter(tA, uV, uH, c.KVH);
    scatter(tDA, uV, uV, c.KVV);
    scatter(tA, uV, uV, c.KVV);

    if (zero_iterate) {
      scatter(tDA, uH, uV, c.KHV);
      scatter(tA, uH, uV, c.KHV);
    } else {
      Vector beta(uV.size());
      for (Eigen::Index i = 0; i < uV.size(); ++i) beta[i] = x[uV[i]];
      const Vector gamma = projected_velocity_coeffs(c.PU, beta);
      const auto [Mz1, Mz2] = build_weighted_mass(c.dims, c.mono, gamma);
      const Matrix MdPU = build_mdpu(Mz1, Mz2, c.PU);
      const Matrix sym_MdPU = symmetrizer(c.dims.m) * MdPU;
      scatter(tDA, uH, uV, c.KHV + c.PbT * sym_MdPU);
      scatter(tA, uH, uV, c.KHV + c.PbT * MdPU);
      const Matrix G2 = -params_.kappa2 * c.PGUT * MdPU;
      const Matrix DG2 = -params_.kappa2 * c.PGUT * sym_MdPU;
      scatter(tDA, uV, uV, DG2);
      scatter(tA, uV, uV, G2);
    }

    for (Eigen::Index i = 0; i < uH.size(); ++i) {
      tDA.emplace_back(uH[i], dofmap_.xi_index, c.atra[i]);
      tA.emplace_back(uH[i], dofmap_.xi_index, c.atra[i]);
      tDA.emplace_back(dofmap_.xi_index, uH[i], c.atra[i]);
      tA.emplace_back(dofmap_.xi_index, uH[i], c.atra[i]);
      b[uH[i]] += c.bH[i];
    }
    for (Eigen::Index i = 0; i < uV.size(); ++i) b[uV[i]] += c.bV[i];
  }
  // Keep the multiplier diagonal entry in the pattern explicitly.
  tDA.emplace_back(dofmap_.xi_index, dofmap_.xi_index, 0.0);
  tA.emplace_back(dofmap_.xi_index, dofmap_.xi_index, 0.0);

  GlobalSystem sys;
  sys.DA.resize(N, N);
  sys.DA.setFromTriplets(tDA.begin(), tDA.end());
  sys.A.resize(N, N);
  sys.A.setFromTriplets(tA.begin(), tA.end());
  sys.b = std::move(b);
  return sys;
}

Vector solve_linear(const SparseMatrix& A, const Vector& b) {
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_linear: factorization failed (" + lu.lastErrorMessage() + ")");
  Vector x = lu.solve(b);
  const double scale = A.coeffs().cwiseAbs().maxCoeff() * x.norm() + b.norm();
  const double residual = (A * x - b).norm();
  if (!(residual <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "solve_linear: residual " << residual << " exceeds 1e-10 * " << scale
        << " (matrix nearly singular or severely ill-conditioned)";
    throw std::runtime_error(msg.str());
  }
  return x;
}

Vector solve_bordered(const SparseMatrix& full, const Vector& b, const Vector& kernel,
                      const Vector& trace) {
  const int N = static_cast<int>(full.rows());
  const int n = N - 1;
  const Vector z = kernel.head(n);
  const Vector a = trace.head(n);
  const double az = a.dot(z);
  if (az == 0.0) throw std::runtime_error("solve_bordered: trace functional misses the kernel");

  // The constraint block is solvable exactly when eta cancels the kernel
  // component of the right-hand side.
  const double eta = z.dot(b.head(n)) / az;
  const Vector r = b.head(n) - eta * a;

  // Bump one diagonal entry in the kernel's strongest position; the shifted
  // block is nonsingular and its solution of K~ x = r is the particular
  // solution with vanishing p-component.
  int p = 0;
  z.cwiseAbs().maxCoeff(&p);
  SparseMatrix K = full.topLeftCorner(n, n);
  double diag_scale = 0.0;
  for (int i = 0; i < n; ++i) diag_scale += std::abs(K.coeff(i, i));
  diag_scale = std::max(diag_scale / n, 1e-300);
  const double alpha = diag_scale / (z[p] * z[p]);
  K.coeffRef(p, p) += alpha;
  K.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_bordered: factorization failed (" + lu.lastErrorMessage() +
                             ")");
  const Vector x0 = lu.solve(r);
  const double t = (b[n] - a.dot(x0)) / az;

  Vector x(N);
  x.head(n) = x0 + t * z;
  x[n] = eta;

  const double scale = full.coeffs().cwiseAbs().maxCoeff() * x.norm() + b.norm();
  const double residual = (full * x - b).norm();
  if (!(residual <= 1e-10 * scale)) {
    std::ostringstream msg;
    msg << "solve_bordered: residual " << residual << " exceeds 1e-10 * " << scale;
    throw std::runtime_error(msg.str());
  }
  return x;
}

NewtonState newton_solve(const Assembler& assembler, double tol, int maxit) {
  if (!(tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
  NewtonState state;

  const GlobalSystem stokes = assembler.assemble(Vector());
  state.x = solve_bordered(stokes.DA, stokes.b, assembler.identity_kernel(),
                           assembler.trace_functional());

  for (int s = 1; s <= maxit; ++s) {
    const GlobalSystem sys = assembler.assemble(state.x);
    const Vector rhs = sys.b - sys.A * state.x;
    state.residual_norms.push_back(rhs.norm());
    const Vector delta =
        solve_bordered(sys.DA, rhs, assembler.identity_kernel(), assembler.trace_functional());
    state.x += delta;
    const double inc = delta.norm();
    state.increment_norms.push_back(inc);
    if (inc <= tol) {
      state.iterations = s;
      state.xi = state.x[assembler.dof_map().xi_index];
      return state;
    }
  }
  std::ostringstream msg;
  msg << "newton_solve: no convergence after " << maxit << " iterations; increments:";
  for (double v : state.increment_norms) msg << " " << v;
  throw std::runtime_error(msg.str());
}

}  // namespace polyvem
