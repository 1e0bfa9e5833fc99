#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "polyvem/study.hpp"
#include "polyvem/verify.hpp"

namespace {

std::vector<int> parse_degrees(const std::string& spec) {
  std::vector<int> degrees;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const int k = std::stoi(item);
    if (k < 0) throw CLI::ValidationError("--degrees", "degrees must be >= 0");
    degrees.push_back(k);
  }
  if (degrees.empty()) throw CLI::ValidationError("--degrees", "no degrees given");
  return degrees;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed virtual element solver for the pseudostress-velocity "
               "Navier-Stokes equations on polygonal meshes"};
  app.require_subcommand(1);

  auto* study = app.add_subcommand(
      "study", "Kovasznay convergence study on (-0.5,1.5)x(0,2); writes a CSV report");
  std::string kind = "triangles";
  std::string degrees = "0,1,2";
  std::string out = "report.csv";
  std::string export_dir, mesh_file;
  polyvem::StudyConfig config;
  study->add_option("--kind", kind, "Mesh family: triangles|quads|hexagons")
      ->check(CLI::IsMember({"triangles", "quads", "hexagons"}));
  study->add_option("--degrees", degrees, "Comma-separated polynomial degrees (default 0,1,2)");
  study->add_option("--levels", config.levels, "Number of refinement levels")->default_val(3);
  study->add_option("--h0", config.h0, "Coarsest target mesh size")->default_val(0.25);
  study->add_option("--mu", config.mu, "Viscosity")->default_val(0.1);
  study->add_option("--kappa1", config.kappa1, "Augmentation parameter kappa1")->default_val(0.1);
  study->add_option("--kappa2", config.kappa2, "Augmentation parameter kappa2")->default_val(0.1);
  study->add_option("--kappa3", config.kappa3, "Augmentation parameter kappa3")->default_val(0.1);
  study->add_option("--tol", config.tol, "Newton increment tolerance")->default_val(1e-6);
  study->add_option("--maxit", config.maxit, "Newton iteration cap")->default_val(20);
  study->add_option("--seed", config.seed, "Mesh generator seed")->default_val(1);
  study->add_option("--out", out, "Output CSV path")->default_val("report.csv");
  study->add_option("--export-fields", export_dir,
                    "Directory for per-cell polynomial coefficient dumps");
  study->add_option("--mesh", mesh_file, "Mesh file overriding generation (single level)");

  auto* verify = app.add_subcommand("verify", "Run the property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (study->parsed()) {
      config.kind = polyvem::mesh_kind_from_string(kind);
      config.degrees = parse_degrees(degrees);
      config.export_dir = export_dir;
      config.mesh_file = mesh_file;
      const polyvem::StudyReport report = polyvem::run_convergence_study(config);
      std::ofstream file(out);
      if (!file) {
        std::cerr << "cannot open " << out << " for writing\n";
        return 2;
      }
      polyvem::write_csv(report, file);
      polyvem::write_csv(report, std::cout);
      bool any_failed = false;
      for (const polyvem::StudyRow& row : report.rows) {
        if (row.failed) {
          any_failed = true;
          std::cerr << "level failed (k=" << row.k << "): " << row.failure << "\n";
        }
      }
      return any_failed ? 2 : 0;
    }
    if (verify->parsed()) {
      bool all_pass = true;
      for (const polyvem::CheckResult& r : polyvem::run_property_suite()) {
        std::printf("%-36s %s  (%s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        all_pass = all_pass && r.pass;
      }
      return all_pass ? 0 : 2;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
