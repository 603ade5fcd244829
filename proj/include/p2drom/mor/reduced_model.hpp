// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "p2drom/mor/artifact.hpp"

namespace p2drom {

/// Reduced coefficients, stacked [a1 | a2 | a3 | a4].
struct ReducedState {
  Vec coeffs;
  double time = 0.0;
};

struct RomTrajectory {
  ParameterPoint parameter;
  double dt = 0.0;
  std::vector<ReducedState> states;
  bool reached_e_min = false;
  double final_time = 0.0;
  std::optional<double> soc_at_emin;
  std::vector<int> newton_iterations;
  std::string failure;
};

/// Online evaluator of the interpolated reduced system. Only the DOFs read by
/// the interpolation rows are ever reconstructed.
class ReducedModel {
 public:
  ReducedModel(const RomArtifact& artifact, const CellConfig& cfg, const PseudoMesh& mesh);
  ~ReducedModel();
  ReducedModel(const ReducedModel&) = delete;
  ReducedModel& operator=(const ReducedModel&) = delete;

  void set_parameter(const ParameterPoint& mu, double dt);
  const RomArtifact& artifact() const { return art_; }
  const PseudoMesh& mesh() const { return mesh_; }
  int size() const { return total_; }
  int offset(Component c) const { return roff_[static_cast<int>(c)]; }
  int size(Component c) const { return art_.comp[static_cast<int>(c)].basis.size(); }

  Vec project(const Vec& u) const;
  /// Projection of the initial state.
  const Vec& initial_coefficients() const { return a0_; }
  Vec lift(const Vec& a) const;

  /// Interpolated reduced residual sum_i V_i^T U_i (P_i^T U_i)^{-1} G[P_i] - V^T f.
  void residual(const Vec& a, const Vec& a_prev, Vec& r);
  /// Exact derivative of residual() with respect to a.
  void jacobian(const Vec& a, const Vec& a_prev, Mat& jac);

  /// Minimum of the reconstructed solid potential over the cathode nodes.
  double min_cathode_potential(const Vec& a) const;

  /// Full-state values read per evaluation (size of the interpolation stencil).
  int stencil_size() const;
  /// Cumulative number of reconstructed DOF values (complexity probe).
  std::uint64_t dof_touches() const { return touches_; }
  std::uint64_t entity_evaluations() const;

 private:
  void lift_stencil(const Vec& a, Vec& full);

  RomArtifact art_;
  PseudoMesh mesh_;
  std::unique_ptr<Discretization> disc_;
  std::unique_ptr<RestrictedEvaluator> eval_;
  int total_ = 0;
  std::array<int, 4> roff_{};
  std::array<int, 4> poff_{};  // offsets of the component blocks in the point rows
  Mat coef_;                   // block-diagonal V^T U (P^T U)^{-1}, total_ x M
  Vec load_dir_;               // V^T e_collector (load = c * load_dir_)
  // stencil reconstruction: per component the global DOFs and the matching rows of V
  std::array<std::vector<int>, 4> sdofs_;
  std::array<Mat, 4> srows_;
  Mat cathode_rows_;  // rows of V_2 at the cathode nodes
  Vec a0_;
  Vec ufull_, upfull_;
  Vec gp_;
  Mat jg_;
  std::vector<JacobianEntry> entries_;
  std::uint64_t touches_ = 0;
};

struct RomOptions {
  double dt = 1e-2;
  double t_end = 1.0;
  double e_min = -0.2;
  double rtol = 1e-5;
  double atol = 1e-12;
  int max_iter = 25;
  /// Step halvings allowed when a trial state leaves the model domain.
  int max_step_cuts = 1;
};

RomOptions rom_options(const CellConfig& cfg);

RomTrajectory rom_simulate(ReducedModel& model, const ParameterPoint& mu, const RomOptions& opt);
/// Convenience overload that builds the evaluator on the fly.
RomTrajectory rom_simulate(const RomArtifact& artifact, const CellConfig& cfg, const PseudoMesh& mesh,
                           const ParameterPoint& mu, const RomOptions& opt);

/// Full states of a reduced trajectory.
Trajectory reconstruct(const ReducedModel& model, const RomTrajectory& rt);

}  // namespace p2drom
