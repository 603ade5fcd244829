// SPDX-License-Identifier: Apache-2.0
#include "p2drom/fom/mesh.hpp"

#include <cmath>
#include <cstdio>

namespace p2drom {

PseudoMesh::PseudoMesh(int n, int nm, const CellConfig& cfg) : n_(n), nm_(nm) {
  if (n < 2 || nm < 2) throw ConfigError("mesh needs at least 2 nodes per region and 2 micro nodes");

  const double w_an = cfg.width_fraction(Region::anode);
  const double w_sep = cfg.width_fraction(Region::separator);
  const double bounds[4] = {0.0, w_an, w_an + w_sep, 1.0};

  xi_.resize(macro_nodes());
  for (int r = 0; r < 3; ++r) {
    for (int j = 0; j < n; ++j) {
      const double t = static_cast<double>(j) / (n - 1);
      xi_[r * (n - 1) + j] = bounds[r] + t * (bounds[r + 1] - bounds[r]);
    }
  }
  // pin the shared points to the exact region bounds
  xi_[n - 1] = bounds[1];
  xi_[2 * n - 2] = bounds[2];
  xi_.back() = 1.0;

  dual_.assign(electrode_nodes(), 0.0);
  for (int e = 0; e < electrode_nodes(); ++e) {
    const int i = macro_of(e);
    if (electrode_element(e)) dual_[e] += 0.5 * (xi_[i + 1] - xi_[i]);
    if (e % n != 0) dual_[e] += 0.5 * (xi_[i] - xi_[i - 1]);
  }

  nu_t_.resize(nm);
  for (int k = 0; k < nm; ++k) nu_t_[k] = static_cast<double>(k) / (nm - 1);
  nu_t_.back() = 1.0;

  // nu^2 * phi_k is cubic on each element; two Gauss points integrate it exactly.
  mmass_.assign(nm, 0.0);
  const double gp = 0.5 / std::sqrt(3.0);
  for (int k = 0; k + 1 < nm; ++k) {
    const double a = nu_t_[k], b = nu_t_[k + 1], h = b - a;
    for (double s : {-gp, gp}) {
      const double x = 0.5 * (a + b) + s * h;
      const double nu = 1.0 - x;
      const double w = 0.5 * h * nu * nu;
      mmass_[k] += w * (b - x) / h;
      mmass_[k + 1] += w * (x - a) / h;
    }
  }

  size_ = {electrode_nodes() * nm, electrode_nodes(), macro_nodes(), macro_nodes()};
  offset_[0] = 0;
  for (int c = 1; c < 4; ++c) offset_[c] = offset_[c - 1] + size_[c - 1];
}

int PseudoMesh::electrode_at(int i) const {
  if (i <= n_ - 1) return i;
  if (i >= 2 * n_ - 2) return n_ + (i - (2 * n_ - 2));
  return -1;
}

Region PseudoMesh::element_region(int el) const {
  if (el < n_ - 1) return Region::anode;
  if (el < 2 * n_ - 2) return Region::separator;
  return Region::cathode;
}

Component PseudoMesh::component_of(int dof) const {
  for (int c = 3; c >= 0; --c)
    if (dof >= offset_[c]) return static_cast<Component>(c);
  return Component::u1;
}

std::string PseudoMesh::signature() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "p2d:N=%d:Nmicro=%d:dofs=%d:xi_an=%.17g:xi_cat=%.17g", n_, nm_,
                dofs(), xi_[n_ - 1], xi_[2 * n_ - 2]);
  return buf;
}

PseudoMesh build_mesh(int n, int nm, const CellConfig& cfg) { return PseudoMesh(n, nm, cfg); }

}  // namespace p2drom
