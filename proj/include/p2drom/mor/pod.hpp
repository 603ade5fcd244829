// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "p2drom/fom/simulate.hpp"

namespace p2drom {

struct SnapshotProvenance {
  ParameterPoint parameter;
  int time_index = 0;
  int newton_stage = -1;  // -1: converged state
};

/// Columns of one solution component, with where each column came from.
struct SnapshotSet {
  Component component = Component::u1;
  Mat columns;
  std::vector<SnapshotProvenance> provenance;

  void append(const Eigen::Ref<const Vec>& col, const SnapshotProvenance& p);
  Eigen::Index size() const { return columns.cols(); }
};

/// Orthonormal modes with their singular values (nonincreasing).
struct BasisMatrix {
  Mat modes;
  Vec singular_values;
  /// Energy discarded by the truncation that produced these modes.
  double truncated_energy = 0.0;
  int size() const { return static_cast<int>(modes.cols()); }
};

/// Relative l2-energy truncation: keeps the smallest r with
/// sqrt(sum_{k>r} s_k^2) <= eps * ||S||_F. If max_modes >= 0 the basis is
/// additionally cut to at most max_modes columns.
BasisMatrix pod(const Mat& snapshots, double eps, int max_modes = -1);
BasisMatrix pod(const SnapshotSet& set, double eps, int max_modes = -1);
/// Same with an absolute tail bound sqrt(sum_{k>r} s_k^2) <= tol.
BasisMatrix pod_absolute(const Mat& snapshots, double tol, int max_modes = -1);

/// Incremental hierarchical approximate POD over an ordered chunk stream.
/// The final basis satisfies ||S - V V^T S||_F <= eps ||S||_F for the
/// concatenation S of all chunks.
BasisMatrix hapod_incremental(const std::vector<Mat>& chunks, double eps, double omega, int max_modes = -1);

/// ||S - V V^T S||_F.
double projection_error(const Mat& modes, const Mat& snapshots);

/// Splits the states of every trajectory into components and compresses each
/// component with one HAPOD chunk per trajectory.
std::array<BasisMatrix, 4> componentwise_basis(const std::vector<Trajectory>& trajectories, const PseudoMesh& mesh,
                                               double eps, double omega,
                                               std::array<int, 4> max_modes = {-1, -1, -1, -1});

/// Snapshot matrix of one component over the states of a trajectory.
Mat component_snapshots(const Trajectory& traj, const PseudoMesh& mesh, Component c);

}  // namespace p2drom
