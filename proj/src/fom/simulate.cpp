// SPDX-License-Identifier: Apache-2.0
#include "p2drom/fom/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <fstream>

#include "p2drom/model/material.hpp"
#include "p2drom/util/binary_io.hpp"

namespace p2drom {

Eigen::Map<const Vec> component(const PseudoMesh& mesh, const Vec& u, Component c) {
  return {u.data() + mesh.offset(c), mesh.size(c)};
}

Eigen::Map<Vec> component(const PseudoMesh& mesh, Vec& u, Component c) {
  return {u.data() + mesh.offset(c), mesh.size(c)};
}

State initial_state(const CellConfig& cfg, const PseudoMesh& mesh) {
  const InitialValues iv = initial_values(cfg);
  State s;
  s.u.resize(mesh.dofs());
  const int nm = mesh.micro_nodes();
  for (int e = 0; e < mesh.electrode_nodes(); ++e) {
    const bool an = mesh.electrode_of(e) == Electrode::anode;
    const double g = logit(an ? iv.y_anode : iv.y_cathode);
    for (int k = 0; k < nm; ++k) s.u[mesh.u1(e, k)] = g;
    s.u[mesh.u2(e)] = an ? iv.phi_s_anode : iv.phi_s_cathode;
  }
  for (int i = 0; i < mesh.macro_nodes(); ++i) {
    s.u[mesh.u3(i)] = iv.y_e;
    s.u[mesh.u4(i)] = iv.phi_e;
  }
  return s;
}

SimulateOptions simulate_options(const CellConfig& cfg) {
  SimulateOptions o;
  o.dt = cfg.solver.dt;
  o.e_min = cfg.e_min;
  o.newton.rtol = cfg.solver.newton_rtol;
  o.newton.atol = cfg.solver.newton_atol;
  o.newton.max_iter = cfg.solver.newton_max_iter;
  return o;
}

double cell_voltage(const PseudoMesh& mesh, const Vec& u) {
  return u[mesh.u2(mesh.electrode_nodes() - 1)] - u[mesh.u2(0)];
}

double cell_voltage_volts(const CellConfig& cfg, double e_dimless) {
  constexpr double kB = 1.380649e-23;
  constexpr double e0 = 1.602176634e-19;
  return kB * cfg.temperature / e0 * e_dimless + (cfg.cathode.half_cell_energy - cfg.anode.half_cell_energy);
}

double min_cathode_potential(const PseudoMesh& mesh, const Vec& u) {
  double m = u[mesh.u2(mesh.nodes_per_region())];
  for (int e = mesh.nodes_per_region() + 1; e < mesh.electrode_nodes(); ++e) m = std::min(m, u[mesh.u2(e)]);
  return m;
}

double state_of_charge(const PseudoMesh& mesh, const Vec& u, Electrode el) {
  const int n = mesh.nodes_per_region();
  const int first = el == Electrode::anode ? 0 : n;
  const auto& mm = mesh.micro_mass();
  double total = 0.0, width = 0.0;
  for (int e = first; e < first + n; ++e) {
    double particle = 0.0;
    for (int k = 0; k < mesh.micro_nodes(); ++k) particle += mm[k] * logistic(u[mesh.u1(e, k)]);
    total += mesh.electrode_dual(e) * 3.0 * particle;
    width += mesh.electrode_dual(e);
  }
  return total / width;
}

double interpolate_soc_at_emin(const PseudoMesh& mesh, const Vec& before, const Vec& after, double e_min) {
  const double m0 = min_cathode_potential(mesh, before);
  const double m1 = min_cathode_potential(mesh, after);
  const double s0 = state_of_charge(mesh, before, Electrode::cathode);
  const double s1 = state_of_charge(mesh, after, Electrode::cathode);
  if (!(m0 > m1)) return s1;
  const double w = std::clamp((m0 - e_min) / (m0 - m1), 0.0, 1.0);
  return s0 + w * (s1 - s0);
}

Trajectory simulate(const ParameterPoint& mu, const CellConfig& cfg, const PseudoMesh& mesh,
                    const SimulateOptions& opt) {
  Discretization disc(cfg, mesh);
  disc.set_parameter(mu, opt.dt);
  NewtonSolver newton(disc);

  Trajectory traj;
  traj.parameter = mu;
  traj.dt = opt.dt;
  traj.states.push_back(initial_state(cfg, mesh));
  const int steps = static_cast<int>(std::llround(opt.t_end / opt.dt));

  for (int t = 1; t <= steps; ++t) {
    const Vec& prev = traj.states.back().u;
    NewtonResult nr;
    try {
      nr = newton.solve(prev, prev, opt.newton);
    } catch (const EvaluabilityError& ex) {
      nr.message = ex.what();
    }
    if (!nr.converged) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "step %d (tau = %.4g): ", t, t * opt.dt);
      traj.failure = buf + nr.message;
      break;
    }
    traj.newton_iterations.push_back(nr.iterations);
    if (opt.newton.record_iterates) traj.newton_stages.push_back(std::move(nr.iterates));
    traj.states.push_back({std::move(nr.u), t * opt.dt});
    if (min_cathode_potential(mesh, traj.states.back().u) <= opt.e_min) {
      traj.reached_e_min = true;
      const auto n = traj.states.size();
      traj.soc_at_emin = interpolate_soc_at_emin(mesh, traj.states[n - 2].u, traj.states[n - 1].u, opt.e_min);
      break;
    }
  }
  traj.final_time = traj.states.back().time;
  return traj;
}

void write_trajectory_csv(const std::filesystem::path& file, const CellConfig& cfg, const PseudoMesh& mesh,
                          const Trajectory& traj) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "tau,soc_cathode,soc_anode,E_dimless,E_volts\n";
  char line[256];
  for (const auto& s : traj.states) {
    const double e = cell_voltage(mesh, s.u);
    std::snprintf(line, sizeof(line), "%.6f,%.12e,%.12e,%.12e,%.12e\n", s.time,
                  state_of_charge(mesh, s.u, Electrode::cathode), state_of_charge(mesh, s.u, Electrode::anode), e,
                  cell_voltage_volts(cfg, e));
    os << line;
  }
}

namespace {
constexpr char kDumpMagic[8] = {'P', '2', 'D', 'S', 'T', 'A', 'T', '1'};
}

void write_state_dump(const std::filesystem::path& file, const PseudoMesh& mesh, const Trajectory& traj) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os.write(kDumpMagic, 8);
  bin::put_i64(os, mesh.nodes_per_region());
  bin::put_i64(os, mesh.micro_nodes());
  for (int c = 0; c < kComponents; ++c) bin::put_i64(os, mesh.size(static_cast<Component>(c)));
  bin::put_i64(os, static_cast<std::int64_t>(traj.states.size()));
  for (const auto& s : traj.states) {
    bin::put_f64(os, s.time);
    for (Eigen::Index i = 0; i < s.u.size(); ++i) bin::put_f64(os, s.u[i]);
  }
}

Trajectory read_state_dump(const std::filesystem::path& file, const PseudoMesh& mesh) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kDumpMagic, 8) != 0)
    throw std::runtime_error(file.string() + ": not a state dump");
  if (bin::get_i64(is) != mesh.nodes_per_region() || bin::get_i64(is) != mesh.micro_nodes())
    throw std::runtime_error(file.string() + ": mesh mismatch");
  for (int c = 0; c < kComponents; ++c)
    if (bin::get_i64(is) != mesh.size(static_cast<Component>(c)))
      throw std::runtime_error(file.string() + ": component size mismatch");
  const auto n = bin::get_i64(is);
  Trajectory traj;
  for (std::int64_t k = 0; k < n; ++k) {
    State s;
    s.time = bin::get_f64(is);
    s.u.resize(mesh.dofs());
    for (int i = 0; i < mesh.dofs(); ++i) s.u[i] = bin::get_f64(is);
    traj.states.push_back(std::move(s));
  }
  if (!traj.states.empty()) traj.final_time = traj.states.back().time;
  return traj;
}

}  // namespace p2drom
