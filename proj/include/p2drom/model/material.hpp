// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "p2drom/model/params.hpp"

namespace p2drom {

// Thermodynamic factors and chemical-potential functions. All arguments are
// mole fractions; functions throw std::domain_error outside their domain.

double gamma_electrolyte(double y, double kappa);  // 1 + 2 kappa y / (1 - 2y)
double gamma_active(double y, double gamma);       // 1 + y/(1-y) + 2 gamma y
double f_active(double y, double gamma);           // ln(y/(1-y)) + gamma (2y - 1)
double f_electrolyte(double y, double kappa);      // ln y - kappa ln(1 - 2y)

/// Butler-Volmer rate factor exp(alpha z) - exp(-(1-alpha) z) and its derivative.
double butler_volmer_g(double z, double alpha);
double butler_volmer_dg(double z, double alpha);

/// Affinity of the intercalation reaction at one interface point.
double surface_affinity(double phi_s, double phi_e, double y_surf, double y_e,
                        const CellConfig& cfg, Electrode e);

/// Electrolyte total concentration relative to n_E,ref, and its storage
/// capacity dN/dy where N(y) = n_tot(y) * y.
double electrolyte_n_tot(double y, const ElectrolyteParams& el, double n_ref);
double electrolyte_capacity(double y, const ElectrolyteParams& el, double n_ref);
double electrolyte_salt(double y, const ElectrolyteParams& el, double n_ref);

/// Hatted coefficients of the homogenized system at one point. Entries that do
/// not exist in the requested region are NaN; asking for them via the checked
/// accessors throws.
struct Coefficients {
  double D_A = 0;      // solid diffusion incl. crowding and nu^2
  double D_E = 0;
  double S_E = 0;
  double sigma_E = 0;
  double sigma_S = 0;
  double c_E = 0;
  double n_tot = 0;
};

/// Coefficients in `region` at electrolyte fraction y_e and, for electrodes,
/// active fraction y_a at radial coordinate nu.
Coefficients coefficients(const CellConfig& cfg, Region region, double y_e, double y_a = 0.5,
                          double nu = 1.0, double d_scale = 1.0);

/// Closed-form initial values shared by the full and reduced models.
struct InitialValues {
  double y_anode = 0;
  double y_cathode = 0;
  double y_e = 0;
  double phi_s_anode = 0;
  double phi_s_cathode = 0;
  double phi_e = 0;
};

InitialValues initial_values(const CellConfig& cfg);

/// Open-circuit voltage at given electrode fillings (dimensionless).
double open_circuit_voltage(const CellConfig& cfg, double y_anode, double y_cathode);

// Logistic transform used for the micro unknown.
double logit(double y);
double logistic(double g);

}  // namespace p2drom
