// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "p2drom/model/params.hpp"

namespace p2drom {

/// Component tags of the discrete unknown: u1 = logit of the particle filling,
/// u2 = solid potential, u3 = electrolyte mole fraction, u4 = electrolyte potential.
enum class Component { u1 = 0, u2 = 1, u3 = 2, u4 = 3 };
inline constexpr int kComponents = 4;

/// Pseudo-2D grid: a macro line (anode | separator | cathode) with a radial
/// particle grid attached to every electrode macro node.
///
/// Macro nodes are shared at the region interfaces, so with N nodes per region
/// the line carries 3N-2 nodes. Electrode nodes are numbered anode first
/// (e = 0..N-1, macro i = e) then cathode (e = N..2N-1, macro i = 2N-2+(e-N)).
/// The radial coordinate is nu_t = 1 - nu; micro node k = 0 sits on the
/// particle surface.
class PseudoMesh {
 public:
  PseudoMesh() = default;
  PseudoMesh(int nodes_per_region, int micro_nodes, const CellConfig& cfg);

  int nodes_per_region() const { return n_; }
  int micro_nodes() const { return nm_; }
  int macro_nodes() const { return 3 * n_ - 2; }
  int macro_elements() const { return 3 * n_ - 3; }
  int electrode_nodes() const { return 2 * n_; }
  int micro_elements() const { return nm_ - 1; }

  const std::vector<double>& xi() const { return xi_; }
  const std::vector<double>& nu_t() const { return nu_t_; }

  int macro_of(int e) const { return e < n_ ? e : 2 * n_ - 2 + (e - n_); }
  Electrode electrode_of(int e) const { return e < n_ ? Electrode::anode : Electrode::cathode; }
  /// Electrode index of macro node i, or -1 inside the separator.
  int electrode_at(int i) const;
  Region element_region(int el) const;
  /// True if electrode nodes e and e+1 bound a macro element of the same electrode.
  bool electrode_element(int e) const { return (e + 1) % n_ != 0; }
  /// Length of the part of the dual cell of electrode node e inside its electrode.
  double electrode_dual(int e) const { return dual_[e]; }
  /// Radial mass weights int nu^2 phi_k dnu of the lumped micro mass matrix.
  const std::vector<double>& micro_mass() const { return mmass_; }

  // Global numbering: [u1 | u2 | u3 | u4], u1 blocks ordered by electrode node.
  int size(Component c) const { return size_[static_cast<int>(c)]; }
  int offset(Component c) const { return offset_[static_cast<int>(c)]; }
  int dofs() const { return offset_[3] + size_[3]; }
  int u1(int e, int k) const { return e * nm_ + k; }
  int u2(int e) const { return offset_[1] + e; }
  int u3(int i) const { return offset_[2] + i; }
  int u4(int i) const { return offset_[3] + i; }
  Component component_of(int dof) const;

  /// Canonical text identifying the grid, stored in reduced-model files.
  std::string signature() const;

 private:
  int n_ = 0;
  int nm_ = 0;
  std::vector<double> xi_;
  std::vector<double> nu_t_;
  std::vector<double> dual_;
  std::vector<double> mmass_;
  std::array<int, 4> size_{};
  std::array<int, 4> offset_{};
};

PseudoMesh build_mesh(int nodes_per_region, int micro_nodes, const CellConfig& cfg);

}  // namespace p2drom
