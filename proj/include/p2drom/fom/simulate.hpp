// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p2drom/fom/discretization.hpp"
#include "p2drom/fom/newton.hpp"

namespace p2drom {

/// One time slice of the discrete unknown, stored as the global vector
/// [u1 | u2 | u3 | u4] in the numbering of PseudoMesh.
struct State {
  Vec u;
  double time = 0.0;
};

Eigen::Map<const Vec> component(const PseudoMesh& mesh, const Vec& u, Component c);
Eigen::Map<Vec> component(const PseudoMesh& mesh, Vec& u, Component c);

State initial_state(const CellConfig& cfg, const PseudoMesh& mesh);

struct Trajectory {
  ParameterPoint parameter;
  double dt = 0.0;
  std::vector<State> states;
  bool reached_e_min = false;
  double final_time = 0.0;
  /// Cathode filling where the minimum cathode potential crosses E_min,
  /// linearly interpolated between the last two steps.
  std::optional<double> soc_at_emin;
  std::vector<int> newton_iterations;  // per accepted step
  /// Newton iterates of step t (entry t-1 belongs to states[t]), if recorded.
  std::vector<std::vector<Vec>> newton_stages;
  std::string failure;  // empty when the run ended normally
};

struct SimulateOptions {
  double dt = 1e-2;
  double t_end = 1.0;
  double e_min = -0.2;
  NewtonSettings newton;
};

SimulateOptions simulate_options(const CellConfig& cfg);

Trajectory simulate(const ParameterPoint& mu, const CellConfig& cfg, const PseudoMesh& mesh,
                    const SimulateOptions& opt);

/// Dimensionless cell voltage: cathode collector minus anode collector solid potential.
double cell_voltage(const PseudoMesh& mesh, const Vec& u);
/// Voltage in volts: thermal-voltage scaling plus the half-cell energy offset.
double cell_voltage_volts(const CellConfig& cfg, double e_dimless);
double min_cathode_potential(const PseudoMesh& mesh, const Vec& u);
/// Mean filling of one electrode, 3 int nu^2 y dnu averaged over the electrode.
double state_of_charge(const PseudoMesh& mesh, const Vec& u, Electrode e);

/// Interpolated crossing of E_min between two consecutive states.
double interpolate_soc_at_emin(const PseudoMesh& mesh, const Vec& before, const Vec& after, double e_min);

/// Trajectory CSV: tau, soc_cathode, soc_anode, E_dimless, E_volts.
void write_trajectory_csv(const std::filesystem::path& file, const CellConfig& cfg, const PseudoMesh& mesh,
                          const Trajectory& traj);
/// Full-state dump (see README for the layout).
void write_state_dump(const std::filesystem::path& file, const PseudoMesh& mesh, const Trajectory& traj);
Trajectory read_state_dump(const std::filesystem::path& file, const PseudoMesh& mesh);

}  // namespace p2drom
