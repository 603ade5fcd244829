// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "p2drom/fom/mesh.hpp"
#include "p2drom/model/params.hpp"

namespace p2drom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Thrown when a state cannot be evaluated (electrolyte fraction outside
/// (0, 1/2) or non-finite entries). Newton treats it as a rejected step.
struct EvaluabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Assembly is organised by mesh entities. Every residual row is the sum of
/// the contributions of the entities touching it, accumulated in the canonical
/// order (kind, index); restricted evaluation uses the same order and is
/// therefore bitwise identical to full assembly.
enum class EntityKind : std::uint8_t {
  micro_mass,
  micro_element,
  solid_element,
  electrolyte_mass,
  electrolyte_element,
  reaction,
  dirichlet,
};

struct Entity {
  EntityKind kind;
  int index;
  auto operator<=>(const Entity&) const = default;
};

struct JacobianEntry {
  int slot;  // row slot (global row for full assembly)
  int col;   // global column
  double value;
};

/// Time-discrete finite-element operator G(u; u_prev) and its load f for
/// one parameter point and step size. F = G - f is the Newton residual.
class Discretization {
 public:
  Discretization(const CellConfig& cfg, const PseudoMesh& mesh);

  void set_parameter(const ParameterPoint& mu, double dt);
  const ParameterPoint& parameter() const { return mu_; }
  double dt() const { return dt_; }
  const PseudoMesh& mesh() const { return mesh_; }
  const CellConfig& config() const { return cfg_; }
  int dofs() const { return mesh_.dofs(); }

  /// Operator image G(u; u_prev), i.e. the residual without the current load.
  void operator_image(const Vec& u, const Vec& u_prev, Vec& g) const;
  /// Newton residual F = G - f.
  void residual(const Vec& u, const Vec& u_prev, Vec& r) const;
  void jacobian(const Vec& u, const Vec& u_prev, SpMat& jac) const;
  /// Neumann load vector f (nonzero only at the cathode collector).
  Vec load() const;
  int collector_dof() const { return mesh_.u2(mesh_.electrode_nodes() - 1); }
  double collector_load() const;

  /// Cheap domain check used before evaluating a trial state.
  bool evaluable(const Vec& u) const;

  // Entity-level access used by the restricted evaluator.
  std::vector<Entity> entities_for_rows(const std::vector<int>& rows) const;
  std::vector<int> reads(const Entity& ent) const;
  /// Adds the contributions of `ents` to out[slot[row]] for rows with slot >= 0.
  void eval_residual(const std::vector<Entity>& ents, const double* u, const double* up,
                     const int* slot, double* out) const;
  void eval_jacobian(const std::vector<Entity>& ents, const double* u, const double* up,
                     const int* slot, std::vector<JacobianEntry>& out) const;

 private:
  template <class Sink>
  void eval(const Entity& ent, const double* u, const double* up, Sink& sink) const;

  CellConfig cfg_;
  PseudoMesh mesh_;
  ParameterPoint mu_;
  double dt_ = 1e-2;
  std::vector<Entity> all_;
  std::vector<double> elyte_mass_;  // lumped psi_E-weighted nodal lengths
  std::vector<int> full_slot_;
};

/// Evaluates selected rows of G and of its Jacobian, touching only the
/// entities adjacent to those rows.
class RestrictedEvaluator {
 public:
  RestrictedEvaluator() = default;
  RestrictedEvaluator(const Discretization& disc, std::vector<int> rows);

  const std::vector<int>& rows() const { return rows_; }
  /// Global DOFs read by the selected rows (sorted).
  const std::vector<int>& stencil() const { return stencil_; }
  const std::vector<Entity>& entities() const { return ents_; }

  /// u, u_prev: full-length vectors of which only the stencil entries are read.
  void operator_image(const Vec& u, const Vec& u_prev, Vec& out) const;
  void jacobian(const Vec& u, const Vec& u_prev, std::vector<JacobianEntry>& out) const;

  /// Number of entity evaluations since construction (complexity probe).
  std::uint64_t entity_evaluations() const { return evals_; }

 private:
  const Discretization* disc_ = nullptr;
  std::vector<int> rows_;
  std::vector<int> stencil_;
  std::vector<Entity> ents_;
  std::vector<int> slot_;
  mutable std::uint64_t evals_ = 0;
};

/// Convenience wrapper: G restricted to `rows`.
Vec restricted_residual(const Discretization& disc, const Vec& u, const Vec& u_prev,
                        const std::vector<int>& rows);

}  // namespace p2drom
