// SPDX-License-Identifier: Apache-2.0
#include "p2drom/model/material.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace p2drom {

namespace {

[[noreturn]] void domain(const char* fn, double y) {
  throw std::domain_error(std::string(fn) + ": argument " + std::to_string(y) + " outside domain");
}

}  // namespace

double gamma_electrolyte(double y, double kappa) {
  if (!(y >= 0.0 && y < 0.5)) domain("gamma_electrolyte", y);
  return 1.0 + 2.0 * kappa * y / (1.0 - 2.0 * y);
}

double gamma_active(double y, double gamma) {
  if (!(y > 0.0 && y < 1.0)) domain("gamma_active", y);
  return 1.0 + y / (1.0 - y) + 2.0 * gamma * y;
}

double f_active(double y, double gamma) {
  if (!(y > 0.0 && y < 1.0)) domain("f_active", y);
  return std::log(y / (1.0 - y)) + gamma * (2.0 * y - 1.0);
}

double f_electrolyte(double y, double kappa) {
  if (!(y > 0.0 && y < 0.5)) domain("f_electrolyte", y);
  return std::log(y) - kappa * std::log1p(-2.0 * y);
}

double butler_volmer_g(double z, double alpha) {
  return std::exp(alpha * z) - std::exp(-(1.0 - alpha) * z);
}

double butler_volmer_dg(double z, double alpha) {
  return alpha * std::exp(alpha * z) + (1.0 - alpha) * std::exp(-(1.0 - alpha) * z);
}

double surface_affinity(double phi_s, double phi_e, double y_surf, double y_e,
                        const CellConfig& cfg, Electrode e) {
  return phi_s - phi_e + f_active(y_surf, cfg.electrode(e).enthalpy_gamma) -
         f_electrolyte(y_e, cfg.electrolyte.solvation_number);
}

double electrolyte_n_tot(double y, const ElectrolyteParams& el, double n_ref) {
  return (el.n_solvent_ref / n_ref) / (1.0 + 2.0 * (el.solvation_number - 1.0) * y);
}

double electrolyte_capacity(double y, const ElectrolyteParams& el, double n_ref) {
  const double d = 1.0 + 2.0 * (el.solvation_number - 1.0) * y;
  return (el.n_solvent_ref / n_ref) / (d * d);
}

double electrolyte_salt(double y, const ElectrolyteParams& el, double n_ref) {
  return electrolyte_n_tot(y, el, n_ref) * y;
}

Coefficients coefficients(const CellConfig& cfg, Region region, double y_e, double y_a, double nu,
                          double d_scale) {
  const auto& el = cfg.electrolyte;
  const auto& g = cfg.region(region);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Coefficients c;
  c.n_tot = electrolyte_n_tot(y_e, el, cfg.n_electrolyte_ref);
  c.c_E = electrolyte_capacity(y_e, el, cfg.n_electrolyte_ref);
  const double ge = gamma_electrolyte(y_e, el.solvation_number);
  const double pe = g.psi_E * g.pi_E;
  c.D_E = pe * el.diff_coeff * c.n_tot * ge;
  c.S_E = pe * el.migration_coeff() * c.n_tot * ge;
  c.sigma_E = pe * el.molar_conductivity * c.n_tot * y_e;
  if (region == Region::separator) {
    c.D_A = nan;
    c.sigma_S = nan;
    return c;
  }
  const Electrode e = region == Region::anode ? Electrode::anode : Electrode::cathode;
  const auto& ep = cfg.electrode(e);
  c.sigma_S = g.psi_S * g.pi_S * ep.solid_conductivity;
  // (1-y) Gamma_A = 1 + 2 gamma y (1-y): the pole of Gamma_A cancels the
  // crowding factor, so the expanded form is also valid at the end points.
  if (!(y_a >= 0.0 && y_a <= 1.0)) domain("coefficients", y_a);
  c.D_A = d_scale * (1.0 + 2.0 * ep.enthalpy_gamma * y_a * (1.0 - y_a)) * nu * nu;
  return c;
}

InitialValues initial_values(const CellConfig& cfg) {
  const auto& el = cfg.electrolyte;
  InitialValues v;
  v.y_anode = cfg.anode.y_initial;
  v.y_cathode = cfg.cathode.y_initial;
  v.y_e = el.n_salt_ref / (el.n_solvent_ref - 2.0 * el.solvation_number * el.n_salt_ref);
  if (!(v.y_e > 0.0 && v.y_e < 0.5))
    throw ConfigError("initial electrolyte mole fraction outside (0, 0.5)");
  const double fa = f_active(v.y_anode, cfg.anode.enthalpy_gamma);
  const double fc = f_active(v.y_cathode, cfg.cathode.enthalpy_gamma);
  v.phi_s_anode = 0.0;
  v.phi_s_cathode = fa - fc;
  v.phi_e = fa - f_electrolyte(v.y_e, el.solvation_number);
  return v;
}

double open_circuit_voltage(const CellConfig& cfg, double y_anode, double y_cathode) {
  return f_active(y_anode, cfg.anode.enthalpy_gamma) - f_active(y_cathode, cfg.cathode.enthalpy_gamma);
}

double logit(double y) { return std::log(y) - std::log1p(-y); }

double logistic(double g) {
  if (g >= 0.0) return 1.0 / (1.0 + std::exp(-g));
  const double e = std::exp(g);
  return e / (1.0 + e);
}

}  // namespace p2drom
