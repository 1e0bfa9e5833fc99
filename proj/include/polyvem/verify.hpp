#pragma once

#include <string>
#include <vector>

#include "polyvem/linalg.hpp"

namespace polyvem {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

CheckResult check_mesh_invariants();
CheckResult check_quadrature_consistency();
/// Polynomial consistency of Pbt/Pb, Rb, PU, PGU on random polygons.
CheckResult check_projector_consistency();
/// Ha/Hd vanish on consistency-degree polynomial DOFs; A_sta, D_sta PSD.
CheckResult check_stabilization_kernels();
/// ||Mo Ao||_F <= 1e-11 ||Mo||_F on every element of the test meshes.
CheckResult check_nullspace_residual();
/// Finite-difference slope of the convection form against the DG blocks.
CheckResult check_gateaux_derivative();
/// Divergence-free polynomial solution reproduced on a 2-element mesh.
CheckResult check_patch_test();
/// Global DOF count matches the closed formula on generated meshes.
CheckResult check_dof_count();

std::vector<CheckResult> run_property_suite();

}  // namespace polyvem
