// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <random>

#include "p2drom/fom/simulate.hpp"
#include "p2drom/model/material.hpp"

using namespace p2drom;

namespace {

struct Desk {
  CellConfig cfg = CellConfig::reference();
  PseudoMesh mesh = build_mesh(8, 5, cfg);
  SimulateOptions opt = simulate_options(cfg);
};

Vec random_direction(Eigen::Index n, std::mt19937_64& rng) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  return v;
}

}  // namespace

TEST_CASE("mesh numbering") {
  const CellConfig cfg = CellConfig::reference();
  for (auto [n, m] : {std::pair{2, 2}, {20, 10}, {100, 100}}) {
    const PseudoMesh mesh = build_mesh(n, m, cfg);
    CHECK(mesh.size(Component::u1) == 2 * n * m);
    CHECK(mesh.size(Component::u2) == 2 * n);
    CHECK(mesh.size(Component::u3) == 3 * n - 2);
    CHECK(mesh.size(Component::u4) == 3 * n - 2);
    CHECK(mesh.dofs() == 2 * n * m + 2 * n + 2 * (3 * n - 2));
    CHECK(mesh.macro_of(n - 1) == n - 1);
    CHECK(mesh.macro_of(n) == 2 * n - 2);
    if (n > 2) CHECK(mesh.electrode_at(n) == -1);
    CHECK(mesh.xi().front() == 0.0);
    CHECK(mesh.xi().back() == doctest::Approx(1.0));
  }
  CHECK_THROWS(build_mesh(1, 5, cfg));
}

TEST_CASE("radial mass weights integrate nu^2") {
  const CellConfig cfg = CellConfig::reference();
  const PseudoMesh mesh = build_mesh(4, 12, cfg);
  double s = 0.0;
  for (double w : mesh.micro_mass()) s += w;
  CHECK(s == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("the initial state is a fixed point without current") {
  Desk d;
  Discretization disc(d.cfg, d.mesh);
  disc.set_parameter({0.0, 0.5, 0.5}, 1e-2);
  const Vec u0 = initial_state(d.cfg, d.mesh).u;
  Vec r;
  disc.residual(u0, u0, r);
  CHECK(r.norm() < 1e-10);

  d.opt.t_end = 0.1;
  const Trajectory tr = simulate({0.0, 0.5, 0.5}, d.cfg, d.mesh, d.opt);
  REQUIRE(tr.states.size() == 11);
  for (const auto& s : tr.states) CHECK((s.u - u0).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("Jacobian agrees with directional finite differences") {
  Desk d;
  const Trajectory tr = simulate({2.0, 0.3, 0.2}, d.cfg, d.mesh, d.opt);
  REQUIRE(tr.failure.empty());
  Discretization disc(d.cfg, d.mesh);
  disc.set_parameter(tr.parameter, tr.dt);
  std::mt19937_64 rng(3);
  SpMat jac;
  Vec rp, rm;
  for (std::size_t t : {std::size_t{1}, tr.states.size() / 2, tr.states.size() - 1}) {
    const Vec& u = tr.states[t].u;
    disc.jacobian(u, tr.states[t - 1].u, jac);
    for (int k = 0; k < 5; ++k) {
      const Vec v = random_direction(u.size(), rng);
      disc.residual(u + 1e-6 * v, tr.states[t - 1].u, rp);
      disc.residual(u - 1e-6 * v, tr.states[t - 1].u, rm);
      const Vec jv = jac * v;
      CHECK(((rp - rm) / 2e-6 - jv).norm() / jv.norm() < 1e-6);
    }
  }
}

TEST_CASE("restricted evaluation is bitwise equal to full assembly") {
  Desk d;
  const Trajectory tr = simulate({1.0, 0.5, 0.5}, d.cfg, d.mesh, d.opt);
  Discretization disc(d.cfg, d.mesh);
  disc.set_parameter(tr.parameter, tr.dt);
  const Vec& u = tr.states[5].u;
  const Vec& up = tr.states[4].u;
  Vec g;
  disc.operator_image(u, up, g);

  std::vector<int> rows;
  for (int i = 0; i < disc.dofs(); i += 7) rows.push_back(i);
  rows.push_back(disc.collector_dof());
  const RestrictedEvaluator ev(disc, rows);
  Vec gr;
  ev.operator_image(u, up, gr);
  for (std::size_t k = 0; k < rows.size(); ++k) CHECK(gr[static_cast<Eigen::Index>(k)] == g[rows[k]]);

  // only stencil values are read: poisoning everything else changes nothing
  Vec poisoned = Vec::Constant(u.size(), std::nan(""));
  Vec poisoned_prev = poisoned;
  for (int dof : ev.stencil()) {
    poisoned[dof] = u[dof];
    poisoned_prev[dof] = up[dof];
  }
  Vec gp;
  ev.operator_image(poisoned, poisoned_prev, gp);
  CHECK(gp == gr);

  SpMat jac;
  disc.jacobian(u, up, jac);
  std::vector<JacobianEntry> entries;
  ev.jacobian(u, up, entries);
  Mat dense = Mat::Zero(static_cast<Eigen::Index>(rows.size()), u.size());
  for (const auto& e : entries) dense(e.slot, e.col) += e.value;
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int c = 0; c < u.size(); ++c) CHECK(dense(static_cast<Eigen::Index>(k), c) == jac.coeff(rows[k], c));
}

TEST_CASE("discharge keeps the lithium balance and stays below the open circuit") {
  Desk d;
  for (double ch : {0.5, 1.0, 3.0}) {
    const Trajectory tr = simulate({ch, 0.5, 0.5}, d.cfg, d.mesh, d.opt);
    REQUIRE(tr.failure.empty());
    CHECK(tr.reached_e_min);
    REQUIRE(tr.soc_at_emin);
    const double y0 = state_of_charge(d.mesh, tr.states[0].u, Electrode::cathode);
    for (const auto& s : tr.states) {
      CHECK(std::abs(state_of_charge(d.mesh, s.u, Electrode::cathode) - y0 - s.time) < 1e-8);
      const double ocp = open_circuit_voltage(d.cfg, state_of_charge(d.mesh, s.u, Electrode::anode),
                                              state_of_charge(d.mesh, s.u, Electrode::cathode));
      if (s.time > 0) CHECK(cell_voltage(d.mesh, s.u) < ocp);
    }
  }
}

TEST_CASE("capacity at E_min falls with the charge rate") {
  Desk d;
  double last = 1.0;
  for (double ch : {0.1, 1.0, 3.0}) {
    const auto cap = simulate({ch, 0.5, 0.5}, d.cfg, d.mesh, d.opt).soc_at_emin;
    REQUIRE(cap);
    CHECK(*cap < last);
    last = *cap;
  }
}

TEST_CASE("states outside the electrolyte range are not evaluable") {
  Desk d;
  Discretization disc(d.cfg, d.mesh);
  disc.set_parameter({1.0, 0.5, 0.5}, 1e-2);
  Vec u = initial_state(d.cfg, d.mesh).u;
  CHECK(disc.evaluable(u));
  u[d.mesh.u3(3)] = 0.5;
  CHECK_FALSE(disc.evaluable(u));
  Vec r;
  CHECK_THROWS_AS(disc.residual(u, u, r), EvaluabilityError);
}

TEST_CASE("state dump round trip") {
  Desk d;
  d.opt.newton.record_iterates = true;
  const Trajectory tr = simulate({1.5, 0.4, 0.3}, d.cfg, d.mesh, d.opt);
  const auto file = std::filesystem::temp_directory_path() / "p2drom_states_test.bin";
  write_state_dump(file, d.mesh, tr);
  const Trajectory back = read_state_dump(file, d.mesh);
  REQUIRE(back.states.size() == tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    CHECK(back.states[k].u == tr.states[k].u);
    CHECK(back.states[k].time == tr.states[k].time);
  }
  const PseudoMesh other = build_mesh(9, 5, d.cfg);
  CHECK_THROWS(read_state_dump(file, other));
  std::filesystem::remove(file);
}

TEST_CASE("Newton iterates are recorded per step") {
  Desk d;
  d.opt.newton.record_iterates = true;
  d.opt.t_end = 0.05;
  const Trajectory tr = simulate({1.0, 0.5, 0.5}, d.cfg, d.mesh, d.opt);
  REQUIRE(tr.newton_stages.size() == tr.states.size() - 1);
  for (std::size_t t = 0; t < tr.newton_stages.size(); ++t) {
    CHECK(tr.newton_stages[t].front() == tr.states[t].u);
    CHECK(tr.newton_stages[t].back() == tr.states[t + 1].u);
  }
}
