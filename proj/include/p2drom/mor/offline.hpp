// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "p2drom/mor/artifact.hpp"

namespace p2drom {

struct OfflineSettings {
  double eps_basis = 4e-8;
  double eps_collateral = 4e-8;
  double omega = 0.9;
  /// Upper bounds on the basis / collateral sizes per component (-1: tolerance only).
  std::array<int, 4> basis_modes{-1, -1, -1, -1};
  std::array<int, 4> collateral_modes{-1, -1, -1, -1};
  /// Use all Newton iterates for the collateral snapshots (off: converged states only).
  bool newton_stages = true;
  /// Incremental HAPOD over per-trajectory chunks; off: one global POD per component.
  bool use_hapod = true;
  /// Worker threads for the training solves (0: hardware concurrency).
  int threads = 0;
};

struct OfflineReport {
  double fom_seconds = 0.0;
  double basis_seconds = 0.0;
  double collateral_seconds = 0.0;
  double total_seconds = 0.0;
  long snapshot_count = 0;
  long operator_snapshot_count = 0;
  std::array<double, 4> point_conditions{};
};

/// Runs the full model for every training point, compresses states and
/// operator images, selects interpolation points and precomputes projections.
/// A failing training solve aborts with the offending parameter in the message.
RomArtifact offline_build(const std::vector<ParameterPoint>& train, const CellConfig& cfg, const PseudoMesh& mesh,
                          const SimulateOptions& sim, const OfflineSettings& settings,
                          OfflineReport* report = nullptr);

/// Same, reusing already computed training trajectories (Newton stages recorded).
RomArtifact offline_build(const std::vector<Trajectory>& trajectories, const CellConfig& cfg,
                          const PseudoMesh& mesh, const OfflineSettings& settings, OfflineReport* report = nullptr);

/// Training solves only (Newton stages recorded), in input order.
std::vector<Trajectory> training_trajectories(const std::vector<ParameterPoint>& train, const CellConfig& cfg,
                                              const PseudoMesh& mesh, SimulateOptions sim, int threads = 0);

}  // namespace p2drom
