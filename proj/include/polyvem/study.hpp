#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "polyvem/kovasznay.hpp"

namespace polyvem {

struct StudyConfig {
  MeshKind kind = MeshKind::Triangles;
  std::vector<int> degrees = {0, 1, 2};
  int levels = 3;
  double h0 = 0.25;
  double mu = 0.1;
  double kappa1 = 0.1;
  double kappa2 = 0.1;
  double kappa3 = 0.1;
  double tol = 1e-6;
  int maxit = 20;
  std::uint64_t seed = 1;
  std::string mesh_file;    // when set, replaces generation (single level)
  std::string export_dir;   // when set, per-cell field coefficients are written
};

struct StudyRow {
  int k = 0;
  double h = 0.0;
  int N = 0;
  ErrorValues err;
  // Rates against the previous level; NaN on the first row of each degree.
  double r_sigma, r_u, r_uH1, r_p;
  int newton_iters = 0;
  double p_mean_ratio = 0.0;  // |mean of p_hat| / ||p_hat||
  bool failed = false;
  std::string failure;
};

struct StudyReport {
  std::vector<StudyRow> rows;
};

/// Kovasznay convergence study on the fixed benchmark domain: loops degrees
/// and refinement levels (h0 / 2^level), solving with Newton and tabulating
/// errors and observed rates. Solver failures are recorded per level and the
/// study continues.
StudyReport run_convergence_study(const StudyConfig& config);

/// CSV columns: k,h,N,e_sigma,r_sigma,e_u,r_u,e_uH1,r_uH1,e_p,r_p.
/// Errors use scientific notation with 3 significant digits, rates two
/// decimals; rate cells are empty where undefined.
void write_csv(const StudyReport& report, std::ostream& out);

/// One text file per field ("sigma", "velocity", "pressure"); per element a
/// line "elem_id degree c_1 ... c_n" of monomial coefficients.
void export_fields(const Assembler& assembler, const ComputableSolution& sol,
                   const std::string& dir, const std::string& tag);

}  // namespace polyvem
