// SPDX-License-Identifier: Apache-2.0
#include "p2drom/fom/discretization.hpp"

#include <algorithm>
#include <cmath>

#include "p2drom/model/material.hpp"

namespace p2drom {

namespace {

const double kGauss = 0.5 / std::sqrt(3.0);

struct ResidualSink {
  const int* slot;
  double* out;
  void r(int row, double v) {
    const int s = slot[row];
    if (s >= 0) out[s] += v;
  }
  void j(int, int, double) {}
  static constexpr bool jac = false;
};

struct JacobianSink {
  const int* slot;
  std::vector<JacobianEntry>* out;
  void r(int, double) {}
  void j(int row, int col, double v) {
    const int s = slot[row];
    if (s >= 0) out->push_back({s, col, v});
  }
  static constexpr bool jac = true;
};

void check_electrolyte(double y) {
  if (!(y > 0.0 && y < 0.5)) throw EvaluabilityError("electrolyte mole fraction left (0, 1/2)");
}

// Electrolyte transport coefficients and their derivatives at mole fraction y.
struct ElectrolyteCoeffs {
  double D, dD, S, dS, sig, dsig;
};

ElectrolyteCoeffs electrolyte_coeffs(const CellConfig& cfg, double pe, double y) {
  const auto& el = cfg.electrolyte;
  const double kappa = el.solvation_number;
  const double a = el.n_solvent_ref / cfg.n_electrolyte_ref;
  const double d = 1.0 + 2.0 * (kappa - 1.0) * y;
  const double n = a / d;
  const double dn = -2.0 * (kappa - 1.0) * a / (d * d);
  const double q = 1.0 - 2.0 * y;
  const double gam = 1.0 + 2.0 * kappa * y / q;
  const double dgam = 2.0 * kappa / (q * q);
  const double ng = n * gam, dng = dn * gam + n * dgam;
  const double lam = el.molar_conductivity, mig = el.migration_coeff();
  return {pe * el.diff_coeff * ng, pe * el.diff_coeff * dng, pe * mig * ng,
          pe * mig * dng,          pe * lam * n * y,           pe * lam * (dn * y + n)};
}

}  // namespace

Discretization::Discretization(const CellConfig& cfg, const PseudoMesh& mesh) : cfg_(cfg), mesh_(mesh) {
  cfg_.validate();
  const int ne = mesh_.electrode_nodes();
  const int nm = mesh_.micro_nodes();
  const int nx = mesh_.macro_nodes();

  for (int d = 0; d < ne * nm; ++d) all_.push_back({EntityKind::micro_mass, d});
  for (int d = 0; d < ne * (nm - 1); ++d) all_.push_back({EntityKind::micro_element, d});
  for (int e = 0; e < ne; ++e)
    if (mesh_.electrode_element(e)) all_.push_back({EntityKind::solid_element, e});
  for (int i = 0; i < nx; ++i) all_.push_back({EntityKind::electrolyte_mass, i});
  for (int el = 0; el < mesh_.macro_elements(); ++el) all_.push_back({EntityKind::electrolyte_element, el});
  for (int e = 0; e < ne; ++e) all_.push_back({EntityKind::reaction, e});
  all_.push_back({EntityKind::dirichlet, 0});

  elyte_mass_.assign(nx, 0.0);
  const auto& xi = mesh_.xi();
  for (int el = 0; el < mesh_.macro_elements(); ++el) {
    const double w = 0.5 * cfg_.region(mesh_.element_region(el)).psi_E * (xi[el + 1] - xi[el]);
    elyte_mass_[el] += w;
    elyte_mass_[el + 1] += w;
  }

  full_slot_.resize(mesh_.dofs());
  for (int r = 0; r < mesh_.dofs(); ++r) full_slot_[r] = r;
}

void Discretization::set_parameter(const ParameterPoint& mu, double dt) {
  mu.validate();
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  mu_ = mu;
  dt_ = dt;
}

// The collector current leaves the cell: -sigma_S dphi_S/dxi = C_h eta_W at xi = 1.
double Discretization::collector_load() const { return -mu_.c_rate * cfg_.eta_w_cathode(); }

Vec Discretization::load() const {
  Vec f = Vec::Zero(dofs());
  f[collector_dof()] = collector_load();
  return f;
}

bool Discretization::evaluable(const Vec& u) const {
  if (!u.allFinite()) return false;
  const int o = mesh_.offset(Component::u3);
  for (int i = 0; i < mesh_.macro_nodes(); ++i) {
    const double y = u[o + i];
    if (!(y > 0.0 && y < 0.5)) return false;
  }
  return true;
}

template <class Sink>
void Discretization::eval(const Entity& ent, const double* u, const double* up, Sink& sink) const {
  const PseudoMesh& m = mesh_;
  const int nm = m.micro_nodes();
  const int dir_row = m.u2(0);

  switch (ent.kind) {
    case EntityKind::micro_mass: {
      const int e = ent.index / nm, k = ent.index % nm;
      const double rt = cfg_.electrode(m.electrode_of(e)).particle_radius;
      const double c = rt * rt * mu_.c_rate * m.micro_mass()[k] / dt_;
      const int d = ent.index;
      const double y = logistic(u[d]);
      if constexpr (Sink::jac) {
        sink.j(d, d, c * y * (1.0 - y));
      } else {
        sink.r(d, c * (y - logistic(up[d])));
      }
      break;
    }
    case EntityKind::micro_element: {
      const int e = ent.index / (nm - 1), j = ent.index % (nm - 1);
      const double gam = cfg_.electrode(m.electrode_of(e)).enthalpy_gamma;
      const double D = mu_.d_scale;
      const double xa = m.nu_t()[j], xb = m.nu_t()[j + 1], h = xb - xa;
      const int a = m.u1(e, j), b = a + 1;
      const double ga = u[a], gb = u[b];
      const double dg = (gb - ga) / h;
      double flux = 0.0, dfa = 0.0, dfb = 0.0;
      for (double s : {-kGauss, kGauss}) {
        const double x = 0.5 * (xa + xb) + s * h;
        const double pa = (xb - x) / h, pb = (x - xa) / h;
        const double nu = 1.0 - x;
        const double w = 0.5 * h * nu * nu;
        const double y = logistic(ga * pa + gb * pb);
        const double sy = y * (1.0 - y);
        const double kap = D * (1.0 + 2.0 * gam * sy) * sy;
        flux += w * kap * dg;
        if constexpr (Sink::jac) {
          const double dkap = D * (1.0 + 4.0 * gam * sy) * sy * (1.0 - 2.0 * y);
          dfa += w * (dkap * pa * dg - kap / h);
          dfb += w * (dkap * pb * dg + kap / h);
        }
      }
      if constexpr (Sink::jac) {
        sink.j(a, a, -dfa / h);
        sink.j(a, b, -dfb / h);
        sink.j(b, a, dfa / h);
        sink.j(b, b, dfb / h);
      } else {
        sink.r(a, -flux / h);
        sink.r(b, flux / h);
      }
      break;
    }
    case EntityKind::solid_element: {
      const int e = ent.index;
      const int i = m.macro_of(e);
      const Region reg = region_of(m.electrode_of(e));
      const auto& g = cfg_.region(reg);
      const double sig = g.psi_S * g.pi_S * cfg_.electrode(m.electrode_of(e)).solid_conductivity;
      const double h = m.xi()[i + 1] - m.xi()[i];
      const int a = m.u2(e), b = m.u2(e + 1);
      const double c = sig / h;
      if constexpr (Sink::jac) {
        if (a != dir_row) {
          sink.j(a, a, c);
          sink.j(a, b, -c);
        }
        sink.j(b, a, -c);
        sink.j(b, b, c);
      } else {
        const double flux = c * (u[b] - u[a]);
        if (a != dir_row) sink.r(a, -flux);
        sink.r(b, flux);
      }
      break;
    }
    case EntityKind::electrolyte_mass: {
      const int i = ent.index;
      const int d = m.u3(i);
      const double y = u[d];
      check_electrolyte(y);
      const double c = elyte_mass_[i] * mu_.c_rate / dt_;
      const auto& el = cfg_.electrolyte;
      if constexpr (Sink::jac) {
        sink.j(d, d, c * electrolyte_capacity(y, el, cfg_.n_electrolyte_ref));
      } else {
        const double yp = up[d];
        check_electrolyte(yp);
        sink.r(d, c * (electrolyte_salt(y, el, cfg_.n_electrolyte_ref) -
                       electrolyte_salt(yp, el, cfg_.n_electrolyte_ref)));
      }
      break;
    }
    case EntityKind::electrolyte_element: {
      const int el = ent.index;
      const auto& g = cfg_.region(m.element_region(el));
      const double pe = g.psi_E * g.pi_E;
      const double h = m.xi()[el + 1] - m.xi()[el];
      const int ya_i = m.u3(el), yb_i = m.u3(el + 1);
      const int pa_i = m.u4(el), pb_i = m.u4(el + 1);
      const double ya = u[ya_i], yb = u[yb_i];
      check_electrolyte(ya);
      check_electrolyte(yb);
      const double dy = (yb - ya) / h, dp = (u[pb_i] - u[pa_i]) / h;
      double f3 = 0.0, f4 = 0.0;
      double d3a = 0.0, d3b = 0.0, d4a = 0.0, d4b = 0.0, d4pa = 0.0, d4pb = 0.0;
      for (double s : {-kGauss, kGauss}) {
        const double pa = 0.5 - s, pb = 0.5 + s;
        const double w = 0.5 * h;
        const auto c = electrolyte_coeffs(cfg_, pe, ya * pa + yb * pb);
        f3 += w * c.D * dy;
        f4 += w * (c.S * dy + c.sig * dp);
        if constexpr (Sink::jac) {
          d3a += w * (c.dD * pa * dy - c.D / h);
          d3b += w * (c.dD * pb * dy + c.D / h);
          d4a += w * (c.dS * pa * dy - c.S / h + c.dsig * pa * dp);
          d4b += w * (c.dS * pb * dy + c.S / h + c.dsig * pb * dp);
          d4pa += w * (-c.sig / h);
          d4pb += w * (c.sig / h);
        }
      }
      if constexpr (Sink::jac) {
        sink.j(ya_i, ya_i, -d3a / h);
        sink.j(ya_i, yb_i, -d3b / h);
        sink.j(yb_i, ya_i, d3a / h);
        sink.j(yb_i, yb_i, d3b / h);
        sink.j(pa_i, ya_i, -d4a / h);
        sink.j(pa_i, yb_i, -d4b / h);
        sink.j(pa_i, pa_i, -d4pa / h);
        sink.j(pa_i, pb_i, -d4pb / h);
        sink.j(pb_i, ya_i, d4a / h);
        sink.j(pb_i, yb_i, d4b / h);
        sink.j(pb_i, pa_i, d4pa / h);
        sink.j(pb_i, pb_i, d4pb / h);
      } else {
        sink.r(ya_i, -f3 / h);
        sink.r(yb_i, f3 / h);
        sink.r(pa_i, -f4 / h);
        sink.r(pb_i, f4 / h);
      }
      break;
    }
    case EntityKind::reaction: {
      const int e = ent.index;
      const int i = m.macro_of(e);
      const Electrode side = m.electrode_of(e);
      const auto& ep = cfg_.electrode(side);
      const double theta = cfg_.region(region_of(side)).theta;
      const double tw = theta * m.electrode_dual(e);
      const double eta = cfg_.eta_n(side);
      const double t = cfg_.electrolyte.transference;
      const double kappa = cfg_.electrolyte.solvation_number;
      const double alpha = cfg_.bv_symmetry;

      const int dg = m.u1(e, 0), ds = m.u2(e), dy = m.u3(i), dp = m.u4(i);
      const double g0 = u[dg];
      const double ys = logistic(g0);
      const double ye = u[dy];
      check_electrolyte(ye);
      // f_A(logistic(g)) = g + gamma (2y - 1)
      const double lam = u[ds] - u[dp] + g0 + ep.enthalpy_gamma * (2.0 * ys - 1.0) -
                         f_electrolyte(ye, kappa);
      const double L = mu_.l_scale;
      // Per-row weights of R. The particle flux is taken along nu_t, which
      // points inward at the surface, so R > 0 removes lithium from the particle.
      const double w1 = ep.particle_radius;
      const double w2 = tw;
      const double w3 = -eta * (1.0 - t) * tw;
      const double w4 = -eta * tw;
      if constexpr (Sink::jac) {
        const double dR = L * butler_volmer_dg(lam, alpha);
        const double sy = ys * (1.0 - ys);
        const double dl[4] = {1.0 + 2.0 * ep.enthalpy_gamma * sy, 1.0,
                              -gamma_electrolyte(ye, kappa) / ye, -1.0};
        const int cols[4] = {dg, ds, dy, dp};
        const int rows[4] = {dg, ds, dy, dp};
        const double wr[4] = {w1, w2, w3, w4};
        for (int r = 0; r < 4; ++r) {
          if (rows[r] == dir_row) continue;
          for (int c = 0; c < 4; ++c) sink.j(rows[r], cols[c], wr[r] * dR * dl[c]);
        }
      } else {
        const double R = L * butler_volmer_g(lam, alpha);
        sink.r(dg, w1 * R);
        if (ds != dir_row) sink.r(ds, w2 * R);
        sink.r(dy, w3 * R);
        sink.r(dp, w4 * R);
      }
      break;
    }
    case EntityKind::dirichlet: {
      if constexpr (Sink::jac) {
        sink.j(dir_row, dir_row, 1.0);
      } else {
        sink.r(dir_row, u[dir_row]);
      }
      break;
    }
  }
}

void Discretization::eval_residual(const std::vector<Entity>& ents, const double* u, const double* up,
                                   const int* slot, double* out) const {
  ResidualSink sink{slot, out};
  for (const auto& ent : ents) eval(ent, u, up, sink);
}

void Discretization::eval_jacobian(const std::vector<Entity>& ents, const double* u, const double* up,
                                   const int* slot, std::vector<JacobianEntry>& out) const {
  JacobianSink sink{slot, &out};
  for (const auto& ent : ents) eval(ent, u, up, sink);
}

void Discretization::operator_image(const Vec& u, const Vec& u_prev, Vec& g) const {
  g.setZero(dofs());
  eval_residual(all_, u.data(), u_prev.data(), full_slot_.data(), g.data());
}

void Discretization::residual(const Vec& u, const Vec& u_prev, Vec& r) const {
  operator_image(u, u_prev, r);
  r[collector_dof()] -= collector_load();
}

void Discretization::jacobian(const Vec& u, const Vec& u_prev, SpMat& jac) const {
  std::vector<JacobianEntry> entries;
  entries.reserve(all_.size() * 8);
  eval_jacobian(all_, u.data(), u_prev.data(), full_slot_.data(), entries);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(entries.size());
  for (const auto& en : entries) trip.emplace_back(en.slot, en.col, en.value);
  jac.resize(dofs(), dofs());
  jac.setFromTriplets(trip.begin(), trip.end());
}

std::vector<Entity> Discretization::entities_for_rows(const std::vector<int>& rows) const {
  const PseudoMesh& m = mesh_;
  const int nm = m.micro_nodes();
  const int nx = m.macro_nodes();
  std::vector<Entity> out;
  for (int row : rows) {
    if (row < 0 || row >= m.dofs()) throw std::out_of_range("row index outside the DOF range");
    switch (m.component_of(row)) {
      case Component::u1: {
        const int e = row / nm, k = row % nm;
        out.push_back({EntityKind::micro_mass, row});
        if (k > 0) out.push_back({EntityKind::micro_element, e * (nm - 1) + k - 1});
        if (k < nm - 1) out.push_back({EntityKind::micro_element, e * (nm - 1) + k});
        if (k == 0) out.push_back({EntityKind::reaction, e});
        break;
      }
      case Component::u2: {
        const int e = row - m.offset(Component::u2);
        if (e == 0) {
          out.push_back({EntityKind::dirichlet, 0});
          break;
        }
        if (m.electrode_element(e - 1)) out.push_back({EntityKind::solid_element, e - 1});
        if (m.electrode_element(e)) out.push_back({EntityKind::solid_element, e});
        out.push_back({EntityKind::reaction, e});
        break;
      }
      case Component::u3:
      case Component::u4: {
        const bool mass = m.component_of(row) == Component::u3;
        const int i = row - m.offset(m.component_of(row));
        if (mass) out.push_back({EntityKind::electrolyte_mass, i});
        if (i > 0) out.push_back({EntityKind::electrolyte_element, i - 1});
        if (i < nx - 1) out.push_back({EntityKind::electrolyte_element, i});
        if (const int e = m.electrode_at(i); e >= 0) out.push_back({EntityKind::reaction, e});
        break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> Discretization::reads(const Entity& ent) const {
  const PseudoMesh& m = mesh_;
  const int nm = m.micro_nodes();
  switch (ent.kind) {
    case EntityKind::micro_mass: return {ent.index};
    case EntityKind::micro_element: {
      const int a = m.u1(ent.index / (nm - 1), ent.index % (nm - 1));
      return {a, a + 1};
    }
    case EntityKind::solid_element: return {m.u2(ent.index), m.u2(ent.index + 1)};
    case EntityKind::electrolyte_mass: return {m.u3(ent.index)};
    case EntityKind::electrolyte_element:
      return {m.u3(ent.index), m.u3(ent.index + 1), m.u4(ent.index), m.u4(ent.index + 1)};
    case EntityKind::reaction: {
      const int i = m.macro_of(ent.index);
      return {m.u1(ent.index, 0), m.u2(ent.index), m.u3(i), m.u4(i)};
    }
    case EntityKind::dirichlet: return {m.u2(0)};
  }
  return {};
}

RestrictedEvaluator::RestrictedEvaluator(const Discretization& disc, std::vector<int> rows)
    : disc_(&disc), rows_(std::move(rows)) {
  slot_.assign(disc.dofs(), -1);
  for (std::size_t s = 0; s < rows_.size(); ++s) {
    if (slot_.at(rows_[s]) >= 0) throw std::invalid_argument("duplicate row in restricted evaluation");
    slot_[rows_[s]] = static_cast<int>(s);
  }
  ents_ = disc.entities_for_rows(rows_);
  for (const auto& ent : ents_)
    for (int d : disc.reads(ent)) stencil_.push_back(d);
  std::sort(stencil_.begin(), stencil_.end());
  stencil_.erase(std::unique(stencil_.begin(), stencil_.end()), stencil_.end());
}

void RestrictedEvaluator::operator_image(const Vec& u, const Vec& u_prev, Vec& out) const {
  out.setZero(static_cast<Eigen::Index>(rows_.size()));
  disc_->eval_residual(ents_, u.data(), u_prev.data(), slot_.data(), out.data());
  evals_ += ents_.size();
}

void RestrictedEvaluator::jacobian(const Vec& u, const Vec& u_prev, std::vector<JacobianEntry>& out) const {
  out.clear();
  disc_->eval_jacobian(ents_, u.data(), u_prev.data(), slot_.data(), out);
  evals_ += ents_.size();
}

Vec restricted_residual(const Discretization& disc, const Vec& u, const Vec& u_prev,
                        const std::vector<int>& rows) {
  if (rows.empty()) return Vec();
  RestrictedEvaluator ev(disc, rows);
  Vec out;
  ev.operator_image(u, u_prev, out);
  for (std::size_t s = 0; s < rows.size(); ++s)
    if (rows[s] == disc.collector_dof()) out[static_cast<Eigen::Index>(s)] -= disc.collector_load();
  return out;
}

}  // namespace p2drom
