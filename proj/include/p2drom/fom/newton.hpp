// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "p2drom/fom/discretization.hpp"

namespace p2drom {

enum class NewtonCriterion { update, residual };

struct NewtonSettings {
  double rtol = 1e-5;
  double atol = 1e-12;  // on max |F|; an exact start takes zero iterations
  int max_iter = 25;
  NewtonCriterion criterion = NewtonCriterion::update;
  bool record_iterates = false;
};

struct NewtonResult {
  Vec u;
  bool converged = false;
  int iterations = 0;
  double update_norm = 0.0;
  double residual_norm = 0.0;
  /// Iterates u^0 (the initial guess) ... u^K (the returned state), if recorded.
  std::vector<Vec> iterates;
  std::string message;
};

/// Plain Newton with a sparse direct solver. A trial step that leaves the
/// domain of the model is halved once before the step is declared failed.
class NewtonSolver {
 public:
  explicit NewtonSolver(const Discretization& disc);
  ~NewtonSolver();
  NewtonSolver(const NewtonSolver&) = delete;
  NewtonSolver& operator=(const NewtonSolver&) = delete;

  NewtonResult solve(const Vec& u_prev, const Vec& guess, const NewtonSettings& s);

 private:
  NewtonResult iterate(const Vec& u_prev, const Vec& guess, const NewtonSettings& s);
  struct Impl;
  const Discretization& disc_;
  std::unique_ptr<Impl> impl_;
};

NewtonResult newton_solve(const Discretization& disc, const Vec& u_prev, const NewtonSettings& s);

}  // namespace p2drom
