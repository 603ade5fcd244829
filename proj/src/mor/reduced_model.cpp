// SPDX-License-Identifier: Apache-2.0
#include "p2drom/mor/reduced_model.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>

namespace p2drom {

ReducedModel::ReducedModel(const RomArtifact& artifact, const CellConfig& cfg, const PseudoMesh& mesh)
    : art_(artifact), mesh_(mesh) {
  art_.check_compatible(cfg, mesh);
  disc_ = std::make_unique<Discretization>(cfg, mesh_);

  std::vector<int> rows;
  int m_total = 0;
  for (int c = 0; c < kComponents; ++c) {
    const RomComponent& rc = art_.comp[c];
    if (rc.basis.modes.rows() != mesh_.size(static_cast<Component>(c)))
      throw std::runtime_error("reduced basis does not match the mesh");
    roff_[c] = total_;
    total_ += rc.basis.size();
    poff_[c] = m_total;
    m_total += rc.points.size();
    for (int p : rc.points.indices) rows.push_back(mesh_.offset(static_cast<Component>(c)) + p);
  }
  eval_ = std::make_unique<RestrictedEvaluator>(*disc_, rows);

  coef_ = Mat::Zero(total_, m_total);
  for (int c = 0; c < kComponents; ++c) {
    const RomComponent& rc = art_.comp[c];
    const int m = rc.points.size();
    if (m == 0 || rc.basis.size() == 0) continue;
    // V^T U (P^T U)^{-1}, via the transposed system
    const Mat block = rc.points.system.transpose().partialPivLu().solve(rc.projected.transpose()).transpose();
    coef_.block(roff_[c], poff_[c], rc.basis.size(), m) = block;
  }

  load_dir_ = Vec::Zero(total_);
  const RomComponent& solid = art_.comp[1];
  const int coll = disc_->collector_dof() - mesh_.offset(Component::u2);
  load_dir_.segment(roff_[1], solid.basis.size()) = solid.basis.modes.row(coll).transpose();

  for (int d : eval_->stencil()) {
    const Component c = mesh_.component_of(d);
    sdofs_[static_cast<int>(c)].push_back(d);
  }
  for (int c = 0; c < kComponents; ++c) {
    const Mat& v = art_.comp[c].basis.modes;
    const int off = mesh_.offset(static_cast<Component>(c));
    srows_[c].resize(static_cast<Eigen::Index>(sdofs_[c].size()), v.cols());
    for (std::size_t k = 0; k < sdofs_[c].size(); ++k)
      srows_[c].row(static_cast<Eigen::Index>(k)) = v.row(sdofs_[c][k] - off);
  }
  const int n = mesh_.nodes_per_region();
  cathode_rows_ = solid.basis.modes.middleRows(n, n);

  ufull_ = Vec::Zero(mesh_.dofs());
  upfull_ = Vec::Zero(mesh_.dofs());
  a0_ = project(initial_state(cfg, mesh_).u);
}

ReducedModel::~ReducedModel() = default;

void ReducedModel::set_parameter(const ParameterPoint& mu, double dt) { disc_->set_parameter(mu, dt); }

int ReducedModel::stencil_size() const { return static_cast<int>(eval_->stencil().size()); }

std::uint64_t ReducedModel::entity_evaluations() const { return eval_->entity_evaluations(); }

Vec ReducedModel::project(const Vec& u) const {
  Vec a(total_);
  for (int c = 0; c < kComponents; ++c) {
    const Mat& v = art_.comp[c].basis.modes;
    a.segment(roff_[c], v.cols()) = v.transpose() * component(mesh_, u, static_cast<Component>(c));
  }
  return a;
}

Vec ReducedModel::lift(const Vec& a) const {
  Vec u(mesh_.dofs());
  for (int c = 0; c < kComponents; ++c) {
    const Mat& v = art_.comp[c].basis.modes;
    component(mesh_, u, static_cast<Component>(c)) = v * a.segment(roff_[c], v.cols());
  }
  return u;
}

void ReducedModel::lift_stencil(const Vec& a, Vec& full) {
  for (int c = 0; c < kComponents; ++c) {
    const auto& dofs = sdofs_[c];
    if (dofs.empty()) continue;
    const Vec vals = srows_[c] * a.segment(roff_[c], srows_[c].cols());
    for (std::size_t k = 0; k < dofs.size(); ++k) full[dofs[k]] = vals[static_cast<Eigen::Index>(k)];
    touches_ += dofs.size();
  }
}

void ReducedModel::residual(const Vec& a, const Vec& a_prev, Vec& r) {
  lift_stencil(a, ufull_);
  lift_stencil(a_prev, upfull_);
  eval_->operator_image(ufull_, upfull_, gp_);
  r.noalias() = coef_ * gp_;
  r -= disc_->collector_load() * load_dir_;
}

void ReducedModel::jacobian(const Vec& a, const Vec& a_prev, Mat& jac) {
  lift_stencil(a, ufull_);
  lift_stencil(a_prev, upfull_);
  eval_->jacobian(ufull_, upfull_, entries_);
  jg_.setZero(coef_.cols(), total_);
  const int o2 = mesh_.offset(Component::u2), o3 = mesh_.offset(Component::u3), o4 = mesh_.offset(Component::u4);
  for (const auto& e : entries_) {
    const int c = e.col >= o4 ? 3 : e.col >= o3 ? 2 : e.col >= o2 ? 1 : 0;
    const Mat& v = art_.comp[c].basis.modes;
    const int local = e.col - mesh_.offset(static_cast<Component>(c));
    jg_.row(e.slot).segment(roff_[c], v.cols()) += e.value * v.row(local);
  }
  jac.noalias() = coef_ * jg_;
}

double ReducedModel::min_cathode_potential(const Vec& a) const {
  return (cathode_rows_ * a.segment(roff_[1], cathode_rows_.cols())).minCoeff();
}

RomOptions rom_options(const CellConfig& cfg) {
  RomOptions o;
  o.dt = cfg.solver.dt;
  o.e_min = cfg.e_min;
  o.rtol = cfg.solver.newton_rtol;
  o.atol = cfg.solver.newton_atol;
  o.max_iter = cfg.solver.newton_max_iter;
  return o;
}

namespace {

bool try_residual(ReducedModel& m, const Vec& a, const Vec& prev, Vec& r) {
  if (!a.allFinite()) return false;
  try {
    m.residual(a, prev, r);
  } catch (const EvaluabilityError&) {
    return false;
  }
  return r.allFinite();
}

}  // namespace

RomTrajectory rom_simulate(ReducedModel& model, const ParameterPoint& mu, const RomOptions& opt) {
  model.set_parameter(mu, opt.dt);
  RomTrajectory rt;
  rt.parameter = mu;
  rt.dt = opt.dt;
  rt.states.push_back({model.initial_coefficients(), 0.0});

  const int steps = static_cast<int>(std::llround(opt.t_end / opt.dt));
  Vec r, du, trial;
  Mat jac;
  for (int t = 1; t <= steps; ++t) {
    const Vec prev = rt.states.back().coeffs;
    Vec a = prev;
    bool converged = false;
    int iters = 0;
    std::string why;
    if (!try_residual(model, a, prev, r)) why = "previous state not evaluable";
    for (int it = 0; why.empty() && it <= opt.max_iter; ++it) {
      if (r.lpNorm<Eigen::Infinity>() <= opt.atol) {
        converged = true;
        break;
      }
      if (it == opt.max_iter) break;
      try {
        model.jacobian(a, prev, jac);
      } catch (const EvaluabilityError& ex) {
        why = ex.what();
        break;
      }
      du = jac.partialPivLu().solve(-r);
      if (!du.allFinite()) {
        why = "singular reduced Jacobian";
        break;
      }
      trial = a + du;
      int cuts = 0;
      while (!try_residual(model, trial, prev, r)) {
        if (++cuts > opt.max_step_cuts) break;
        du *= 0.5;
        trial = a + du;
      }
      if (cuts > opt.max_step_cuts) {
        why = "reduced Newton step left the model domain";
        break;
      }
      a = trial;
      iters = it + 1;
      if (du.norm() <= opt.rtol * a.norm()) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "step %d (tau = %.4g): ", t, t * opt.dt);
      rt.failure = buf + (why.empty() ? std::string("no reduced Newton convergence") : why);
      break;
    }
    rt.newton_iterations.push_back(iters);
    rt.states.push_back({a, t * opt.dt});
    if (model.min_cathode_potential(a) <= opt.e_min) {
      rt.reached_e_min = true;
      const auto n = rt.states.size();
      rt.soc_at_emin = interpolate_soc_at_emin(model.mesh(), model.lift(rt.states[n - 2].coeffs),
                                               model.lift(rt.states[n - 1].coeffs), opt.e_min);
      break;
    }
  }
  rt.final_time = rt.states.back().time;
  return rt;
}

RomTrajectory rom_simulate(const RomArtifact& artifact, const CellConfig& cfg, const PseudoMesh& mesh,
                           const ParameterPoint& mu, const RomOptions& opt) {
  ReducedModel model(artifact, cfg, mesh);
  return rom_simulate(model, mu, opt);
}

Trajectory reconstruct(const ReducedModel& model, const RomTrajectory& rt) {
  Trajectory tr;
  tr.parameter = rt.parameter;
  tr.dt = rt.dt;
  tr.reached_e_min = rt.reached_e_min;
  tr.final_time = rt.final_time;
  tr.soc_at_emin = rt.soc_at_emin;
  tr.newton_iterations = rt.newton_iterations;
  tr.failure = rt.failure;
  tr.states.reserve(rt.states.size());
  for (const auto& s : rt.states) tr.states.push_back({model.lift(s.coeffs), s.time});
  return tr;
}

}  // namespace p2drom
