// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "p2drom/cli/run_spec.hpp"
#include "p2drom/degradation/cycle_study.hpp"
#include "p2drom/mor/offline.hpp"

namespace p2drom {

/// One row of the experiment-1 error table.
struct ErrorTableRow {
  std::array<int, 4> basis{};
  std::array<int, 4> collateral{};
  double mean_error = 0.0;  // relative l2-l2 error averaged over the test set
  int failures = 0;         // reduced runs that did not finish (error counted as inf)
  double fom_seconds = 0.0;
  double rom_seconds = 0.0;
};

struct Experiment1Report {
  std::vector<ParameterPoint> train;
  std::vector<ParameterPoint> test;
  OfflineReport offline;
  std::vector<ErrorTableRow> rows;
  std::vector<std::filesystem::path> files;
};

/// Charge-rate sweep of an unaged cell: equidistant training set, nested
/// basis sizes, errors over a seeded random test set.
///
/// Writes exp1_errors.csv, exp1_curves.csv (voltage over capacity, full and
/// reduced), exp1_timing.csv and exp1_offline_timing.csv to spec.out_dir.
Experiment1Report run_experiment_1(const RunSpec& spec);

/// FOM and ROM cycle studies for one schedule.
struct CycleComparison {
  std::string label;  // "beta=0.5" or "c_rate=2"
  DegradationSchedule schedule;
  ParameterPoint base;
  CycleStudyResult fom;
  CycleStudyResult rom;
  double capacity_error = 0.0;
};

struct DegradationReport {
  std::vector<ParameterPoint> train;
  std::vector<ParameterPoint> test;
  OfflineReport offline;
  std::array<int, 4> basis{};
  std::array<int, 4> collateral{};
  std::vector<double> test_errors;  // relative l2-l2, one per test point (inf on failure)
  double mean_test_error = 0.0;
  std::vector<CycleComparison> studies;
  double fom_seconds = 0.0;  // all full cycle studies
  double rom_seconds = 0.0;  // all reduced cycle studies
  double worst_capacity_error() const;
  double speedup() const { return rom_seconds > 0.0 ? fom_seconds / rom_seconds : 0.0; }
  std::vector<std::filesystem::path> files;
};

/// Degradation of D and L at C_h = 1 over a grid of beta values
/// (exp2_capacity.csv, exp2_summary.csv, exp2_test_errors.csv, exp2_timing.csv).
DegradationReport run_experiment_2(const RunSpec& spec);

/// Charge-rate-coupled degradation, mu = [C_h, D, L], at a fixed beta for
/// several charge rates (exp3_*.csv).
DegradationReport run_experiment_3(const RunSpec& spec, std::vector<double> c_rates = {0.5, 1.0, 2.0},
                                   double beta = 0.6);

/// Capacity CSV shared by the cycle-study drivers:
/// label,runner,n,d_value,l_value,c_rate,soc_at_emin.
void write_capacity_csv(const std::filesystem::path& file, const std::vector<CycleComparison>& studies);

}  // namespace p2drom
