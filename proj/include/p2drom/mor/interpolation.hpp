// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "p2drom/mor/pod.hpp"

namespace p2drom {

/// Collateral (operator-image) basis, one orthonormal block per component.
using CollateralBasis = std::array<BasisMatrix, 4>;

/// Greedy interpolation points of one collateral block. `system` is the
/// point-evaluation matrix P^T U (rows = points, columns = modes).
struct InterpolationPoints {
  std::vector<int> indices;  // component-local row indices, in selection order
  Mat system;
  double condition = 1.0;
  int size() const { return static_cast<int>(indices.size()); }
};

/// DEIM-style greedy selection. Throws std::runtime_error naming the mode
/// index if an intermediate point system becomes singular.
InterpolationPoints greedy_points(const Mat& modes);
std::array<InterpolationPoints, 4> greedy_points(const CollateralBasis& basis);

/// Interpolant U (P^T U)^{-1} v[P] of a vector v given on all rows.
Vec interpolate(const Mat& modes, const InterpolationPoints& pts, const Vec& v);

/// Operator images G(u^{t,k}; u^{t-1}) of the Newton iterates of one
/// trajectory, split by component. With `stages == false` only the
/// converged state of every step is used.
std::array<SnapshotSet, 4> collect_operator_snapshots(const Trajectory& traj, const CellConfig& cfg,
                                                      const PseudoMesh& mesh, bool stages = true);
std::array<SnapshotSet, 4> collect_operator_snapshots(const std::vector<Trajectory>& trajs, const CellConfig& cfg,
                                                      const PseudoMesh& mesh, bool stages = true);

}  // namespace p2drom
