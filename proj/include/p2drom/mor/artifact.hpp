// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "p2drom/mor/interpolation.hpp"

namespace p2drom {

struct RomComponent {
  BasisMatrix basis;       // V_i
  BasisMatrix collateral;  // U_i
  InterpolationPoints points;
  Mat projected;  // V_i^T U_i, r_i x M_i
};

/// Everything the online phase needs, plus enough metadata to refuse a
/// mismatched mesh or configuration.
struct RomArtifact {
  std::array<RomComponent, 4> comp;

  std::string config_text;  // key = value dump of the training configuration
  std::uint64_t config_hash = 0;
  std::string mesh_signature;
  int macro_nodes = 0;
  int micro_nodes = 0;
  double dt = 0.0;

  std::vector<ParameterPoint> train;
  double eps_basis = 0.0;
  double eps_collateral = 0.0;
  double omega = 0.0;
  bool newton_stages = true;

  std::array<int, 4> basis_sizes() const;
  std::array<int, 4> collateral_sizes() const;

  /// Leading sub-bases (POD and greedy points are nested, so this equals a
  /// build with fixed sizes). Negative entries keep the current size.
  RomArtifact truncated(std::array<int, 4> basis, std::array<int, 4> collateral = {-1, -1, -1, -1}) const;

  /// Throws std::runtime_error unless cfg and mesh match the training setup.
  void check_compatible(const CellConfig& cfg, const PseudoMesh& mesh) const;
  CellConfig config() const;

  void save(const std::filesystem::path& file) const;
  static RomArtifact load(const std::filesystem::path& file);
};

/// Recomputes V^T U and the point system from basis, collateral and points.
void finalize_component(RomComponent& c);

}  // namespace p2drom
