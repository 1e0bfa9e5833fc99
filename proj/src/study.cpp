#include "polyvem/study.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace polyvem {

StudyReport run_convergence_study(const StudyConfig& config) {
  const KovasznayCase kc = kovasznay_case(config.mu);
  ProblemParams params;
  params.mu = config.mu;
  params.kappa1 = config.kappa1;
  params.kappa2 = config.kappa2;
  params.kappa3 = config.kappa3;
  params.f = [kc](const Vector2& x) { return kc.force(x); };
  params.g = [kc](const Vector2& x) { return kc.velocity(x); };
  params.validate();
  const ExactSolution exact = kc.exact();

  PolygonalMesh file_mesh;
  const bool from_file = !config.mesh_file.empty();
  if (from_file) file_mesh = load_mesh(config.mesh_file);
  const int levels = from_file ? 1 : config.levels;

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  StudyReport report;
  for (int k : config.degrees) {
    const StudyRow* prev = nullptr;
    for (int level = 0; level < levels; ++level) {
      StudyRow row;
      row.k = k;
      row.r_sigma = row.r_u = row.r_uH1 = row.r_p = nan;
      try {
        const PolygonalMesh mesh =
            from_file ? file_mesh
                      : generate_mesh(config.kind, kc.domain, config.h0 / std::pow(2.0, level),
                                      config.seed + static_cast<std::uint64_t>(level));
        row.h = mesh_size(mesh);
        const Assembler assembler(mesh, k, params);
        row.N = assembler.system_size();
        const NewtonState state = newton_solve(assembler, config.tol, config.maxit);
        row.newton_iters = state.iterations;
        const ComputableSolution sol = postprocess(assembler, state);
        row.err = compute_errors(assembler, sol, exact);
        const auto [p_mean, p_norm] = pressure_mean_and_norm(assembler, sol);
        row.p_mean_ratio = std::abs(p_mean) / std::max(p_norm, 1e-300);
        if (prev && !prev->failed) {
          row.r_sigma = convergence_rate(prev->err.e_sigma, row.err.e_sigma, prev->h, row.h);
          row.r_u = convergence_rate(prev->err.e_u, row.err.e_u, prev->h, row.h);
          row.r_uH1 = convergence_rate(prev->err.e_uH1, row.err.e_uH1, prev->h, row.h);
          row.r_p = convergence_rate(prev->err.e_p, row.err.e_p, prev->h, row.h);
        }
        if (!config.export_dir.empty()) {
          char tag[64];
          std::snprintf(tag, sizeof tag, "k%d_level%d", k, level);
          export_fields(assembler, sol, config.export_dir, tag);
        }
      } catch (const std::exception& err) {
        row.failed = true;
        row.failure = err.what();
      }
      report.rows.push_back(std::move(row));
      prev = &report.rows.back();
    }
  }
  return report;
}

void write_csv(const StudyReport& report, std::ostream& out) {
  out << "k,h,N,e_sigma,r_sigma,e_u,r_u,e_uH1,r_uH1,e_p,r_p\n";
  char buf[256];
  for (const StudyRow& row : report.rows) {
    if (row.failed) {
      std::snprintf(buf, sizeof buf, "%d,,,FAILED,,,,,,,\n", row.k);
      out << buf;
      continue;
    }
    auto rate = [](double r, char* s, std::size_t n) {
      if (std::isnan(r))
        s[0] = '\0';
      else
        std::snprintf(s, n, "%.2f", r);
    };
    char rs[16], ru[16], rh[16], rp[16];
    rate(row.r_sigma, rs, sizeof rs);
    rate(row.r_u, ru, sizeof ru);
    rate(row.r_uH1, rh, sizeof rh);
    rate(row.r_p, rp, sizeof rp);
    std::snprintf(buf, sizeof buf, "%d,%.4f,%d,%.2e,%s,%.2e,%s,%.2e,%s,%.2e,%s\n", row.k, row.h,
                  row.N, row.err.e_sigma, rs, row.err.e_u, ru, row.err.e_uH1, rh, row.err.e_p,
                  rp);
    out << buf;
  }
}

void export_fields(const Assembler& assembler, const ComputableSolution& sol,
                   const std::string& dir, const std::string& tag) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const int k = sol.k;
  auto open = [&](const std::string& field) {
    std::ofstream out(fs::path(dir) / (field + "_" + tag + ".txt"));
    if (!out) throw std::runtime_error("export_fields: cannot write in " + dir);
    return out;
  };
  std::ofstream fsig = open("sigma");
  std::ofstream fvel = open("velocity");
  std::ofstream fprs = open("pressure");
  char buf[32];
  auto write_row = [&buf](std::ofstream& out, int elem, int degree, const Vector& coeff) {
    out << elem << " " << degree;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
      std::snprintf(buf, sizeof buf, " %.17g", coeff[i]);
      out << buf;
    }
    out << "\n";
  };
  for (int K = 0; K < assembler.mesh().element_count(); ++K) {
    write_row(fsig, K, k, sol.aK[K]);
    write_row(fvel, K, k, sol.bK[K]);
    write_row(fprs, K, 2 * k, sol.pressure_coefficients(assembler.elements()[K], K));
  }
}

}  // namespace polyvem
