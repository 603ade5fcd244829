// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "p2drom/fom/simulate.hpp"

namespace p2drom {

class ReducedModel;
struct RomOptions;

enum class DegradationTarget { reaction_rate, diffusion, both };

/// Exponential fade F(n) = F0 exp(c ln(beta) n / N), with c = C_h when the
/// fade is coupled to the charge rate and c = 1 otherwise.
struct DegradationSchedule {
  double f0 = 0.5;
  double beta = 0.5;
  int n_total = 1000;
  bool couple_c_rate = false;
  DegradationTarget target = DegradationTarget::both;

  void validate() const;
};

/// Value of the degraded parameter after n cycles. `extrapolated` is set
/// when n lies outside [0, N].
double schedule_eval(int n, const DegradationSchedule& s, double c_rate, bool* extrapolated = nullptr);

/// Parameter point of cycle n: the schedule overwrites D and/or L of `base`.
ParameterPoint cycle_parameter(int n, const DegradationSchedule& s, const ParameterPoint& base);

/// One discharge: capacity at E_min plus an optional (SOC, voltage) curve.
struct DischargeOutcome {
  std::optional<double> soc_at_emin;
  std::vector<std::pair<double, double>> curve;
  std::string failure;
};

using DischargeRunner = std::function<DischargeOutcome(const ParameterPoint&)>;

DischargeRunner fom_runner(const CellConfig& cfg, const PseudoMesh& mesh, const SimulateOptions& opt,
                           bool curves = false);
/// The model must outlive the runner; calls are serialised on it.
DischargeRunner rom_runner(ReducedModel& model, const RomOptions& opt, bool curves = false);

struct CycleRecord {
  int cycle = 0;
  ParameterPoint parameter;
  std::optional<double> soc_at_emin;
  std::vector<std::pair<double, double>> curve;
  double wall_seconds = 0.0;
  std::string failure;
};

struct CycleStudyResult {
  std::string runner;  // "fom" or "rom"
  std::vector<CycleRecord> cycles;
  double total_seconds = 0.0;
  /// True if some recorded capacity increased from one sampled cycle to the next.
  bool non_monotone = false;
};

/// All cycles 0..N, or every `stride`-th cycle plus N.
std::vector<int> sample_cycles(int n_total, int stride = 1);

CycleStudyResult run_cycle_study(const DegradationSchedule& s, const DischargeRunner& runner,
                                 const ParameterPoint& base, const std::vector<int>& cycles,
                                 const std::string& runner_name);

/// Relative space-time error ||u_h - u_r|| / ||u_r|| over the common time
/// steps of a full and a reconstructed reduced trajectory.
double relative_l2l2_error(const Trajectory& fom, const Trajectory& rom);
/// Mean of the per-parameter errors.
double relative_l2l2_error(const std::vector<Trajectory>& fom, const std::vector<Trajectory>& rom);

/// Largest relative capacity deviation |c_rom - c_fom| / |c_fom| over cycles
/// present in both studies.
double capacity_curve_error(const CycleStudyResult& fom, const CycleStudyResult& rom);

/// CSV: n,d_value,l_value,c_rate,soc_at_emin (timing goes to a separate file).
void write_cycle_study_csv(const std::filesystem::path& file, const CycleStudyResult& r);
void write_cycle_timing_csv(const std::filesystem::path& file, const CycleStudyResult& r);

}  // namespace p2drom
