// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "p2drom/cli/run_spec.hpp"
#include "p2drom/fom/simulate.hpp"

namespace p2drom {

/// One entry of the verification report. `measured` is compared against
/// `tolerance` in the direction stated by the check (usually measured < tol).
struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Desk-scale setting shared by the checks.
struct CheckContext {
  RunSpec spec;  // drives the experiment-based checks
  CellConfig cfg;
  PseudoMesh mesh;
  SimulateOptions sim;
  std::filesystem::path scratch_dir;  // where driver-based checks write CSVs
  std::uint64_t seed = 7;

  static CheckContext from(const RunSpec& spec);
};

CheckResult check_equilibrium(const CheckContext& ctx);
CheckResult check_capacity_balance(const CheckContext& ctx);
/// `corrupt` scales one diagonal Jacobian entry by (1 + corrupt) (negative control).
CheckResult check_jacobian_fd(const CheckContext& ctx, double corrupt = 0.0);
CheckResult check_ocp_limit(const CheckContext& ctx);
CheckResult check_material_identities(const CheckContext& ctx);
CheckResult check_pod_oracle(const CheckContext& ctx);
CheckResult check_interpolation_exactness(const CheckContext& ctx);
CheckResult check_rom_reproduction(const CheckContext& ctx);
CheckResult check_table1_trend(const CheckContext& ctx);
CheckResult check_schedules(const CheckContext& ctx);
CheckResult check_cycle_consistency(const CheckContext& ctx);
CheckResult check_determinism(const CheckContext& ctx);

/// The invariant suite run by `verify`: material identities, Jacobian,
/// equilibrium, capacity balance, POD/HAPOD, interpolation, exact reproduction.
std::vector<CheckResult> verify_suite(const CheckContext& ctx);

/// name,pass,measured,tolerance,detail
void write_check_csv(const std::filesystem::path& file, const std::vector<CheckResult>& checks);

}  // namespace p2drom
