// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "p2drom/degradation/cycle_study.hpp"
#include "p2drom/mor/offline.hpp"
#include "p2drom/mor/reduced_model.hpp"

using namespace p2drom;

namespace {

struct Fixture {
  CellConfig cfg = CellConfig::reference();
  PseudoMesh mesh = build_mesh(8, 5, cfg);
  SimulateOptions sim = simulate_options(cfg);
  std::vector<ParameterPoint> train{{0.5, 0.5, 0.5}, {2.0, 0.5, 0.5}};

  RomArtifact build(double eps_b, double eps_c) const {
    OfflineSettings os;
    os.eps_basis = eps_b;
    os.eps_collateral = eps_c;
    os.threads = 1;
    return offline_build(train, cfg, mesh, sim, os);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

const RomArtifact& exact_artifact() {
  static const RomArtifact a = fixture().build(0.0, 0.0);
  return a;
}

}  // namespace

TEST_CASE("untruncated reduced model reproduces its training trajectories") {
  const Fixture& f = fixture();
  ReducedModel model(exact_artifact(), f.cfg, f.mesh);
  for (const auto& mu : f.train) {
    const RomTrajectory rt = rom_simulate(model, mu, rom_options(f.cfg));
    REQUIRE(rt.failure.empty());
    const Trajectory fom = simulate(mu, f.cfg, f.mesh, f.sim);
    CHECK(rt.states.size() == fom.states.size());
    CHECK(relative_l2l2_error(fom, reconstruct(model, rt)) < 1e-6);
    REQUIRE(rt.soc_at_emin);
    CHECK(*rt.soc_at_emin == doctest::Approx(*fom.soc_at_emin).epsilon(1e-6));
  }
}

TEST_CASE("reduced Jacobian matches finite differences of the reduced residual") {
  const Fixture& f = fixture();
  ReducedModel model(exact_artifact().truncated({6, 4, 5, 5}), f.cfg, f.mesh);
  const ParameterPoint mu{1.0, 0.5, 0.5};
  model.set_parameter(mu, f.sim.dt);
  const Trajectory fom = simulate(mu, f.cfg, f.mesh, f.sim);
  const Vec a_prev = model.project(fom.states[3].u);
  const Vec a = model.project(fom.states[4].u);
  Mat jac;
  model.jacobian(a, a_prev, jac);
  Vec rp, rm;
  for (int k = 0; k < model.size(); ++k) {
    const double h = 1e-6 * std::max(1.0, std::abs(a[k]));
    Vec ap = a, am = a;
    ap[k] += h;
    am[k] -= h;
    model.residual(ap, a_prev, rp);
    model.residual(am, a_prev, rm);
    const Vec fd = (rp - rm) / (2 * h);
    CHECK((fd - jac.col(k)).norm() <= 1e-6 * std::max(1.0, jac.col(k).norm()));
  }
  Mat again;
  model.jacobian(a, a_prev, again);
  CHECK(again == jac);
}

TEST_CASE("online work scales with the interpolation stencil, not the mesh") {
  const Fixture& f = fixture();
  ReducedModel model(exact_artifact().truncated({4, 3, 4, 4}, {8, 5, 8, 8}), f.cfg, f.mesh);
  CHECK(model.stencil_size() < f.mesh.dofs());
  model.set_parameter({1.0, 0.5, 0.5}, f.sim.dt);
  Vec r;
  const std::uint64_t before = model.dof_touches();
  model.residual(model.initial_coefficients(), model.initial_coefficients(), r);
  CHECK(model.dof_touches() - before <= static_cast<std::uint64_t>(2 * model.stencil_size()));
}

TEST_CASE("artifact save and load is bit exact") {
  const Fixture& f = fixture();
  const RomArtifact art = f.build(1e-6, 1e-7);
  const auto file = std::filesystem::temp_directory_path() / "p2drom_artifact_test.rom";
  art.save(file);
  const RomArtifact back = RomArtifact::load(file);
  for (int c = 0; c < kComponents; ++c) {
    CHECK(back.comp[c].basis.modes == art.comp[c].basis.modes);
    CHECK(back.comp[c].basis.singular_values == art.comp[c].basis.singular_values);
    CHECK(back.comp[c].collateral.modes == art.comp[c].collateral.modes);
    CHECK(back.comp[c].points.indices == art.comp[c].points.indices);
    CHECK(back.comp[c].projected == art.comp[c].projected);
  }
  CHECK(back.train == art.train);
  CHECK(back.config_hash == art.config_hash);
  CHECK(back.mesh_signature == art.mesh_signature);
  CHECK(back.dt == art.dt);

  // a second save produces the same bytes
  const auto file2 = std::filesystem::temp_directory_path() / "p2drom_artifact_test2.rom";
  back.save(file2);
  std::ifstream a(file, std::ios::binary), b(file2, std::ios::binary);
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));
  std::filesystem::remove(file2);

  // a truncated file is rejected
  std::filesystem::resize_file(file, std::filesystem::file_size(file) / 2);
  CHECK_THROWS(RomArtifact::load(file));
  std::filesystem::remove(file);
  CHECK_THROWS(RomArtifact::load(file));
}

TEST_CASE("artifacts refuse a different mesh or configuration") {
  const Fixture& f = fixture();
  const RomArtifact& art = exact_artifact();
  CHECK_NOTHROW(art.check_compatible(f.cfg, f.mesh));
  CHECK_THROWS(art.check_compatible(f.cfg, build_mesh(9, 5, f.cfg)));
  CellConfig other = f.cfg;
  other.electrolyte.transference = 0.4;
  CHECK_THROWS(art.check_compatible(other, f.mesh));
  CHECK_THROWS(ReducedModel(art, other, f.mesh));
}

TEST_CASE("truncated artifacts are nested") {
  const RomArtifact& art = exact_artifact();
  const RomArtifact sub = art.truncated({3, 2, 3, 3}, {6, 4, 6, 6});
  CHECK(sub.basis_sizes() == std::array<int, 4>{3, 2, 3, 3});
  CHECK(sub.collateral_sizes() == std::array<int, 4>{6, 4, 6, 6});
  for (int c = 0; c < kComponents; ++c) {
    CHECK(sub.comp[c].basis.modes == art.comp[c].basis.modes.leftCols(sub.comp[c].basis.size()));
    for (int k = 0; k < sub.comp[c].points.size(); ++k)
      CHECK(sub.comp[c].points.indices[k] == art.comp[c].points.indices[k]);
  }
  CHECK_THROWS_AS(art.truncated({100000, 1, 1, 1}), std::invalid_argument);
}

TEST_CASE("offline build reports failing training points") {
  const Fixture& f = fixture();
  SimulateOptions broken = f.sim;
  broken.newton.max_iter = 0;
  OfflineSettings os;
  os.threads = 1;
  try {
    offline_build({{1.0, 0.5, 0.5}}, f.cfg, f.mesh, broken, os);
    FAIL("expected a training failure");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).find("C_h = 1") != std::string::npos);
  }
}

TEST_CASE("operator snapshots need recorded Newton stages") {
  const Fixture& f = fixture();
  const Trajectory plain = simulate({1.0, 0.5, 0.5}, f.cfg, f.mesh, f.sim);
  CHECK_THROWS(collect_operator_snapshots(plain, f.cfg, f.mesh));
  SimulateOptions rec = f.sim;
  rec.newton.record_iterates = true;
  const Trajectory tr = simulate({1.0, 0.5, 0.5}, f.cfg, f.mesh, rec);
  const auto all = collect_operator_snapshots(tr, f.cfg, f.mesh, true);
  const auto last = collect_operator_snapshots(tr, f.cfg, f.mesh, false);
  CHECK(last[0].size() == static_cast<Eigen::Index>(tr.states.size() - 1));
  CHECK(all[0].size() > last[0].size());
  CHECK(all[2].columns.rows() == f.mesh.size(Component::u3));
}

TEST_CASE("training is independent of the thread count") {
  const Fixture& f = fixture();
  std::vector<ParameterPoint> train{{0.5, 0.5, 0.5}, {1.0, 0.3, 0.4}, {2.0, 0.5, 0.2}};
  const auto one = training_trajectories(train, f.cfg, f.mesh, f.sim, 1);
  const auto three = training_trajectories(train, f.cfg, f.mesh, f.sim, 3);
  for (std::size_t k = 0; k < train.size(); ++k) {
    REQUIRE(one[k].states.size() == three[k].states.size());
    CHECK(one[k].states.back().u == three[k].states.back().u);
  }
}

TEST_CASE("point systems stay well conditioned on the degradation setting") {
  const Fixture& f = fixture();
  std::vector<ParameterPoint> train;
  for (double d : {0.05, 0.5})
    for (double l : {0.05, 0.5}) train.push_back({1.0, d, l});
  OfflineSettings os;
  os.eps_basis = 1e-5;
  os.eps_collateral = 1e-6;
  os.threads = 1;
  OfflineReport rep;
  offline_build(train, f.cfg, f.mesh, f.sim, os, &rep);
  for (double c : rep.point_conditions) CHECK(c < 1e8);
  CHECK(rep.operator_snapshot_count > rep.snapshot_count);
}
