// SPDX-License-Identifier: Apache-2.0
#include "p2drom/fom/newton.hpp"

#include <Eigen/SparseLU>
#include <cstdio>

namespace p2drom {

struct NewtonSolver::Impl {
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  SpMat jac;
  Vec res;
};

NewtonSolver::NewtonSolver(const Discretization& disc) : disc_(disc), impl_(std::make_unique<Impl>()) {}
NewtonSolver::~NewtonSolver() = default;

NewtonResult NewtonSolver::solve(const Vec& u_prev, const Vec& guess, const NewtonSettings& s) {
  NewtonResult out;
  try {
    return iterate(u_prev, guess, s);
  } catch (const EvaluabilityError& ex) {
    out.u = guess;
    out.message = ex.what();
    return out;
  }
}

NewtonResult NewtonSolver::iterate(const Vec& u_prev, const Vec& guess, const NewtonSettings& s) {
  NewtonResult out;
  out.u = guess;
  if (s.record_iterates) out.iterates.push_back(out.u);
  if (!disc_.evaluable(out.u)) {
    out.message = "initial guess is not evaluable";
    return out;
  }
  Vec& r = impl_->res;

  for (int it = 0; it <= s.max_iter; ++it) {
    disc_.residual(out.u, u_prev, r);
    out.residual_norm = r.lpNorm<Eigen::Infinity>();
    if (out.residual_norm <= s.atol) {
      out.converged = true;
      return out;
    }
    if (s.criterion == NewtonCriterion::residual && it > 0) {
      // relative to the load scale so that a zero state does not divide by zero
      if (r.norm() <= s.rtol * std::max(1.0, out.u.norm())) {
        out.converged = true;
        return out;
      }
    }
    if (it == s.max_iter) break;

    disc_.jacobian(out.u, u_prev, impl_->jac);
    if (!impl_->analyzed) {
      impl_->lu.analyzePattern(impl_->jac);
      impl_->analyzed = true;
    }
    impl_->lu.factorize(impl_->jac);
    if (impl_->lu.info() != Eigen::Success) {
      out.message = "singular Jacobian at iteration " + std::to_string(it);
      return out;
    }
    Vec du = impl_->lu.solve(-r);
    Vec trial = out.u + du;
    if (!disc_.evaluable(trial)) {
      du *= 0.5;
      trial = out.u + du;
      if (!disc_.evaluable(trial)) {
        out.message = "Newton step left the model domain twice at iteration " + std::to_string(it);
        return out;
      }
    }
    out.u = std::move(trial);
    out.iterations = it + 1;
    out.update_norm = du.norm();
    if (s.record_iterates) out.iterates.push_back(out.u);
    if (s.criterion == NewtonCriterion::update && out.update_norm <= s.rtol * out.u.norm()) {
      out.converged = true;
      return out;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "no convergence in %d iterations (|du| = %.3e, |F|inf = %.3e)",
                s.max_iter, out.update_norm, out.residual_norm);
  out.message = buf;
  return out;
}

NewtonResult newton_solve(const Discretization& disc, const Vec& u_prev, const NewtonSettings& s) {
  NewtonSolver solver(disc);
  return solver.solve(u_prev, u_prev, s);
}

}  // namespace p2drom
