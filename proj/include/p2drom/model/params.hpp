// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace p2drom {

enum class Electrode { anode, cathode };
enum class Region { anode, separator, cathode };

const char* to_string(Electrode e);
const char* to_string(Region r);

inline Region region_of(Electrode e) {
  return e == Electrode::anode ? Region::anode : Region::cathode;
}

/// Raised for invalid parameter sets and malformed configuration files.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Liquid electrolyte with solvation; transport parameters are constants.
struct ElectrolyteParams {
  double n_solvent_ref = 11.9103;    // mol/L, pure solvent
  double n_salt_ref = 1.0;           // mol/L, reference salt concentration
  double solvation_number = 4.0;     // kappa
  double transference = 0.5;         // cation transference number
  double diff_coeff = 5.0;           // dimensionless chemical diffusion coefficient
  double molar_conductivity = 10.0;  // dimensionless

  /// Dimensionless migration coefficient S = (2 t - 1) Lambda.
  double migration_coeff() const { return (2.0 * transference - 1.0) * molar_conductivity; }

  void validate() const;
};

/// Intercalation electrode with an ideal lattice-mixture chemical potential.
struct ElectrodeParams {
  double lattice_density = 37.3114;  // mol/L
  double y_initial = 0.5;
  double enthalpy_gamma = 1.0;
  double solid_conductivity = 10.0;  // dimensionless
  double diff_ref = 1.0;             // dimensionless reference solid diffusivity
  double exchange_rate = 1.0;        // dimensionless reaction rate constant
  double half_cell_energy = 0.0;     // V vs. metallic Li
  double particle_radius = 0.4;      // dimensionless, relative to the unit cell
  double unit_cell_width = 10.0;     // nm

  void validate(const char* name) const;
};

/// Homogenized porous-media parameters of one region. The separator has no
/// solid phase, so psi_S, pi_S and theta are zero there.
struct PorousGeometry {
  double psi_E = 0.72713951;
  double psi_S = 0.0;
  double pi_E = 0.86842790;
  double pi_S = 0.0;
  double theta = 0.0;
  double width = 100.0;  // micrometre
};

struct SolverSettings {
  int macro_nodes = 20;  // per region
  int micro_nodes = 10;
  double dt = 1e-2;
  double newton_rtol = 1e-5;
  double newton_atol = 1e-12;
  int newton_max_iter = 25;
};

/// Cell description: materials, geometry, kinetics and solver settings.
struct CellConfig {
  ElectrolyteParams electrolyte;
  ElectrodeParams anode;
  ElectrodeParams cathode;
  std::array<PorousGeometry, 3> geometry;  // indexed by Region
  double bv_symmetry = 0.5;
  double e_min = -0.2;
  double temperature = 298.15;  // K, used only for the volt-scaled voltage report
  double n_electrolyte_ref = 1.0;  // mol/L, concentration scale of the electrolyte
  SolverSettings solver;

  /// Defaults of the reference cell: symmetric ideal electrodes, 100 um layers.
  static CellConfig reference();

  const ElectrodeParams& electrode(Electrode e) const {
    return e == Electrode::anode ? anode : cathode;
  }
  ElectrodeParams& electrode(Electrode e) { return e == Electrode::anode ? anode : cathode; }
  const PorousGeometry& region(Region r) const { return geometry[static_cast<int>(r)]; }
  PorousGeometry& region(Region r) { return geometry[static_cast<int>(r)]; }

  double total_width() const;
  double width_fraction(Region r) const { return region(r).width / total_width(); }
  /// Ratio of lattice density to the electrolyte concentration scale.
  double eta_n(Electrode e) const { return electrode(e).lattice_density / n_electrolyte_ref; }
  /// Active-phase volume fraction of a sphere packing with interfacial area theta.
  double active_fraction(Electrode e) const;
  double eta_w_cathode() const;

  void validate() const;
  /// Stable hash over every parameter (used to tag reduced models).
  std::uint64_t hash() const;
};

/// Online parameter vector: C-rate and the solid diffusivity / reaction rate
/// applied to both electrodes.
struct ParameterPoint {
  double c_rate = 1.0;
  double d_scale = 1.0;
  double l_scale = 1.0;

  void validate() const;
  bool operator==(const ParameterPoint&) const = default;
};

/// Flat `key = value` text; `#` starts a comment. Keys follow the struct
/// layout, e.g. `cathode.y_initial` or `geometry.separator.psi_E`.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_key_values(const std::string& text);
CellConfig load_config(const std::filesystem::path& file);
CellConfig config_from_key_values(const KeyValueMap& kv, CellConfig base = CellConfig::reference());
std::string to_key_values(const CellConfig& config);

}  // namespace p2drom
