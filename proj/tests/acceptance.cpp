// SPDX-License-Identifier: Apache-2.0
// Acceptance gate at desk scale (20 macro nodes per region, 10 micro nodes).
// Prints one PASS/FAIL line per criterion; the exit code is the number of
// failed criteria. Tolerances live next to the checks in src/cli/checks.cpp.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>

#include "p2drom/cli/checks.hpp"

using namespace p2drom;

int main(int argc, char** argv) {
  RunSpec spec;
  spec.macro_nodes = 20;
  spec.micro_nodes = 10;
  spec.dt = 1e-2;
  spec.seed = 7;
  spec.n_cycles = 50;
  spec.betas = {0.1, 0.5, 0.9};
  spec.out_dir = argc > 1 ? argv[1] : (std::filesystem::temp_directory_path() / "p2drom_acceptance").string();
  std::filesystem::create_directories(spec.out_dir);
  const CheckContext ctx = CheckContext::from(spec);

  const std::vector<std::pair<const char*, std::function<CheckResult()>>> criteria = {
      {"1  equilibrium fixed point", [&] { return check_equilibrium(ctx); }},
      {"2  capacity balance", [&] { return check_capacity_balance(ctx); }},
      {"3  Jacobian finite differences", [&] { return check_jacobian_fd(ctx); }},
      {"4  open-circuit limit", [&] { return check_ocp_limit(ctx); }},
      {"5  POD/HAPOD oracle", [&] { return check_pod_oracle(ctx); }},
      {"6  interpolation exactness", [&] { return check_interpolation_exactness(ctx); }},
      {"7  ROM exact reproduction", [&] { return check_rom_reproduction(ctx); }},
      {"8  error decay over basis sizes", [&] { return check_table1_trend(ctx); }},
      {"9  degradation schedules", [&] { return check_schedules(ctx); }},
      {"10 cycle-study consistency", [&] { return check_cycle_consistency(ctx); }},
      {"11 determinism", [&] { return check_determinism(ctx); }},
  };

  int failed = 0;
  std::vector<CheckResult> all;
  for (const auto& [label, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckResult r = run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-34s measured %.3e  tol %.1e  (%.1f s)  %s\n", r.pass ? "PASS" : "FAIL", label, r.measured,
                r.tolerance, secs, r.detail.c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
    all.push_back(r);
  }
  write_check_csv(spec.out_dir / "acceptance.csv", all);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
