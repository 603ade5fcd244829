// SPDX-License-Identifier: Apache-2.0
// Command-line front end: full and reduced discharges, offline builds,
// cycle studies, the experiment drivers and the verification suite.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "p2drom/cli/checks.hpp"
#include "p2drom/cli/experiments.hpp"
#include "p2drom/degradation/cycle_study.hpp"
#include "p2drom/mor/offline.hpp"
#include "p2drom/mor/reduced_model.hpp"

using namespace p2drom;

namespace {

struct Flags {
  std::string config;
  std::string mesh = "20x10";
  double dt = 1e-2;
  double c_rate = 1.0;
  double d = 0.5;
  double l = 0.5;
  std::string train;
  std::string test;
  int test_count = 10;
  std::uint64_t seed = 7;
  std::string out = "out";
  std::string artifact;
  double eps_basis = -1.0;
  double eps_collateral = -1.0;
  double omega = 0.9;
  std::string sizes;
  std::vector<double> betas;
  int cycles = 50;
  int stride = 1;
  int threads = 0;
  bool dump = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value cell configuration (default: reference cell)");
  app->add_option("--mesh", f.mesh, "macro nodes per region x micro nodes, e.g. 20x10")->capture_default_str();
  app->add_option("--dt", f.dt, "time step")->capture_default_str();
  app->add_option("--out", f.out, "output directory")->capture_default_str();
  app->add_option("--seed", f.seed, "seed of the random test set")->capture_default_str();
  app->add_option("--threads", f.threads, "worker threads for training solves (0: all cores)");
}

void add_point(CLI::App* app, Flags& f) {
  app->add_option("--c-rate", f.c_rate, "charge rate C_h")->capture_default_str();
  app->add_option("--d", f.d, "solid diffusivity scale")->capture_default_str();
  app->add_option("--l", f.l, "reaction rate scale")->capture_default_str();
}

void add_rom(CLI::App* app, Flags& f) {
  app->add_option("--train", f.train, "training grid, e.g. \"c_rate=0.01:4:5;d=0.5;l=0.5\"");
  app->add_option("--eps-basis", f.eps_basis, "state basis tolerance");
  app->add_option("--eps-collateral", f.eps_collateral, "collateral basis tolerance");
  app->add_option("--omega", f.omega, "HAPOD tolerance split")->capture_default_str();
}

void add_test(CLI::App* app, Flags& f) {
  app->add_option("--test", f.test, "test box, e.g. \"c_rate=0.01:4;d=0.5\"");
  app->add_option("--test-count", f.test_count, "random test points")->capture_default_str();
}

RunSpec to_spec(const Flags& f, RunMode mode) {
  RunSpec s;
  s.mode = mode;
  s.config_path = f.config;
  const auto x = f.mesh.find('x');
  if (x == std::string::npos) throw ConfigError("--mesh must read NxM, e.g. 20x10");
  s.macro_nodes = std::stoi(f.mesh.substr(0, x));
  s.micro_nodes = std::stoi(f.mesh.substr(x + 1));
  s.dt = f.dt;
  s.point = {f.c_rate, f.d, f.l};
  s.point.validate();
  s.train = f.train;
  s.test = f.test;
  s.test_count = f.test_count;
  s.seed = f.seed;
  if (f.eps_basis >= 0) s.eps_basis = f.eps_basis;
  if (f.eps_collateral >= 0) s.eps_collateral = f.eps_collateral;
  s.omega = f.omega;
  if (!f.sizes.empty()) s.basis_sizes = parse_size_list(f.sizes);
  if (!f.betas.empty()) s.betas = f.betas;
  s.n_cycles = f.cycles;
  s.cycle_stride = f.stride;
  s.threads = f.threads;
  s.out_dir = f.out;
  s.artifact = f.artifact;
  return s;
}

struct Problem {
  CellConfig cfg;
  PseudoMesh mesh;
};

Problem problem(const RunSpec& s) {
  Problem p;
  p.cfg = s.resolved_config();
  p.mesh = build_mesh(s.macro_nodes, s.micro_nodes, p.cfg);
  return p;
}

void print_trajectory_summary(const char* what, const Trajectory& tr) {
  std::printf("%s: %zu steps, tau_end = %.4f", what, tr.states.size() - 1, tr.final_time);
  if (tr.soc_at_emin) std::printf(", capacity at E_min = %.6f", *tr.soc_at_emin);
  std::printf("\n");
  if (!tr.failure.empty()) std::printf("  stopped: %s\n", tr.failure.c_str());
}

int cmd_simulate(const Flags& f) {
  const RunSpec s = to_spec(f, RunMode::simulate);
  const Problem p = problem(s);
  std::filesystem::create_directories(s.out_dir);
  const Trajectory tr = simulate(s.point, p.cfg, p.mesh, simulate_options(p.cfg));
  write_trajectory_csv(s.out_dir / "trajectory.csv", p.cfg, p.mesh, tr);
  if (f.dump) write_state_dump(s.out_dir / "states.bin", p.mesh, tr);
  print_trajectory_summary("full model", tr);
  return tr.failure.empty() ? 0 : 1;
}

int cmd_offline(const Flags& f) {
  const RunSpec s = to_spec(f, RunMode::offline);
  if (s.artifact.empty()) throw ConfigError("offline needs --artifact <file>");
  if (s.train.empty()) throw ConfigError("offline needs --train <grid>");
  const Problem p = problem(s);
  // the collateral tolerance stays a decade below the basis tolerance; with
  // equal tolerances the interpolated Newton system is unstable at desk scale
  OfflineSettings os;
  os.eps_basis = s.eps_basis.value_or(1e-5);
  os.eps_collateral = s.eps_collateral.value_or(os.eps_basis / 10.0);
  os.omega = s.omega;
  os.threads = s.threads;
  OfflineReport rep;
  const auto train = parse_parameter_grid(s.train, s.point);
  const RomArtifact art = offline_build(train, p.cfg, p.mesh, simulate_options(p.cfg), os, &rep);
  if (s.artifact.has_parent_path()) std::filesystem::create_directories(s.artifact.parent_path());
  art.save(s.artifact);
  const auto b = art.basis_sizes();
  const auto m = art.collateral_sizes();
  std::printf("trained on %zu points: bases (%d,%d,%d,%d), collateral (%d,%d,%d,%d)\n", train.size(), b[0], b[1],
              b[2], b[3], m[0], m[1], m[2], m[3]);
  std::printf("offline %.3f s (full solves %.3f s, bases %.3f s, collateral %.3f s)\n", rep.total_seconds,
              rep.fom_seconds, rep.basis_seconds, rep.collateral_seconds);
  for (int c = 0; c < kComponents; ++c)
    std::printf("  point system u%d: condition %.3e\n", c + 1, rep.point_conditions[c]);
  return 0;
}

RomArtifact load_artifact(const RunSpec& s, const Problem& p) {
  if (s.artifact.empty()) throw ConfigError("--artifact <file> is required");
  RomArtifact art = RomArtifact::load(s.artifact);
  art.check_compatible(p.cfg, p.mesh);
  return art;
}

int cmd_rom_run(const Flags& f) {
  const RunSpec s = to_spec(f, RunMode::rom_run);
  const Problem p = problem(s);
  const RomArtifact art = load_artifact(s, p);
  ReducedModel model(art, p.cfg, p.mesh);
  const auto t0 = std::chrono::steady_clock::now();
  const RomTrajectory rt = rom_simulate(model, s.point, rom_options(p.cfg));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::filesystem::create_directories(s.out_dir);
  const Trajectory tr = reconstruct(model, rt);
  write_trajectory_csv(s.out_dir / "rom_trajectory.csv", p.cfg, p.mesh, tr);
  print_trajectory_summary("reduced model", tr);
  std::printf("online %.4f s, %d reduced unknowns, stencil %d of %d DOFs\n", secs, model.size(),
              model.stencil_size(), p.mesh.dofs());
  return rt.failure.empty() ? 0 : 1;
}

int cmd_cycle_study(const Flags& f, double beta, bool coupled, bool rom) {
  const RunSpec s = to_spec(f, RunMode::cycle_study);
  const Problem p = problem(s);
  DegradationSchedule sched;
  sched.f0 = 0.5;
  sched.beta = beta;
  sched.n_total = s.n_cycles;
  sched.couple_c_rate = coupled;
  const auto cycles = sample_cycles(s.n_cycles, s.cycle_stride);
  std::filesystem::create_directories(s.out_dir);

  CycleStudyResult res;
  std::unique_ptr<ReducedModel> model;
  RomArtifact art;
  if (rom) {
    art = load_artifact(s, p);
    model = std::make_unique<ReducedModel>(art, p.cfg, p.mesh);
    res = run_cycle_study(sched, rom_runner(*model, rom_options(p.cfg)), s.point, cycles, "rom");
  } else {
    res = run_cycle_study(sched, fom_runner(p.cfg, p.mesh, simulate_options(p.cfg)), s.point, cycles, "fom");
  }
  write_cycle_study_csv(s.out_dir / ("cycles_" + res.runner + ".csv"), res);
  write_cycle_timing_csv(s.out_dir / ("cycles_" + res.runner + "_timing.csv"), res);
  int failed = 0;
  for (const auto& c : res.cycles)
    if (!c.failure.empty()) {
      if (failed++ == 0) std::printf("cycle %d failed: %s\n", c.cycle, c.failure.c_str());
    }
  std::printf("%s cycle study: %zu cycles in %.3f s, %d failed%s\n", res.runner.c_str(), res.cycles.size(),
              res.total_seconds, failed, res.non_monotone ? ", capacity NOT monotone" : "");
  return failed == 0 ? 0 : 1;
}

int cmd_compare(const Flags& f) {
  const RunSpec s = to_spec(f, RunMode::compare);
  const Problem p = problem(s);
  const RomArtifact art = load_artifact(s, p);
  ReducedModel model(art, p.cfg, p.mesh);
  const auto test = sample_uniform(parse_parameter_box(s.test.empty() ? "" : s.test, s.point), s.test_count, s.seed);
  std::filesystem::create_directories(s.out_dir);
  std::ofstream os(s.out_dir / "compare.csv");
  std::ofstream tm(s.out_dir / "compare_timing.csv");
  os << "c_rate,d_scale,l_scale,error,capacity_fom,capacity_rom\n";
  tm << "c_rate,d_scale,l_scale,fom_seconds,rom_seconds\n";
  double tf = 0, tr = 0, sum = 0;
  int failures = 0;
  char buf[256];
  for (const auto& mu : test) {
    auto t0 = std::chrono::steady_clock::now();
    const Trajectory fom = simulate(mu, p.cfg, p.mesh, simulate_options(p.cfg));
    const double a = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    t0 = std::chrono::steady_clock::now();
    const RomTrajectory rt = rom_simulate(model, mu, rom_options(p.cfg));
    const double b = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    tf += a;
    tr += b;
    double e = std::numeric_limits<double>::infinity();
    if (rt.failure.empty() && fom.failure.empty()) e = relative_l2l2_error(fom, reconstruct(model, rt));
    else ++failures;
    sum += e;
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n", mu.c_rate, mu.d_scale, mu.l_scale, e,
                  fom.soc_at_emin.value_or(NAN), rt.soc_at_emin.value_or(NAN));
    os << buf;
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%.12e,%.6f,%.6f\n", mu.c_rate, mu.d_scale, mu.l_scale, a, b);
    tm << buf;
  }
  std::printf("%zu test points: mean relative error %.3e, %d reduced failures, speedup %.2fx\n", test.size(),
              test.empty() ? 0.0 : sum / test.size(), failures, tr > 0 ? tf / tr : 0.0);
  return failures == 0 ? 0 : 1;
}

int cmd_verify(const Flags& f) {
  const RunSpec s = to_spec(f, RunMode::verify);
  std::filesystem::create_directories(s.out_dir);
  const auto ctx = CheckContext::from(s);
  const auto checks = verify_suite(ctx);
  write_check_csv(s.out_dir / "verify.csv", checks);
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%s %-24s measured %.3e  tolerance %.1e  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.measured, c.tolerance, c.detail.c_str());
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

void print_rows(const Experiment1Report& r) {
  std::printf("%-14s %-14s %-12s %-9s\n", "basis", "collateral", "mean error", "speedup");
  for (const auto& row : r.rows) {
    char b[32], m[32];
    std::snprintf(b, sizeof(b), "%d,%d,%d,%d", row.basis[0], row.basis[1], row.basis[2], row.basis[3]);
    std::snprintf(m, sizeof(m), "%d,%d,%d,%d", row.collateral[0], row.collateral[1], row.collateral[2],
                  row.collateral[3]);
    std::printf("%-14s %-14s %-12.3e %-9.2f\n", b, m, row.mean_error,
                row.rom_seconds > 0 ? row.fom_seconds / row.rom_seconds : 0.0);
  }
}

void print_degradation(const DegradationReport& r) {
  std::printf("bases (%d,%d,%d,%d), collateral (%d,%d,%d,%d), mean test error %.3e\n", r.basis[0], r.basis[1],
              r.basis[2], r.basis[3], r.collateral[0], r.collateral[1], r.collateral[2], r.collateral[3],
              r.mean_test_error);
  for (const auto& s : r.studies)
    std::printf("  %-12s capacity error %.3e  capacity %.4f -> %.4f  (fom %.2f s, rom %.2f s)\n", s.label.c_str(),
                s.capacity_error, s.fom.cycles.front().soc_at_emin.value_or(NAN),
                s.fom.cycles.back().soc_at_emin.value_or(NAN), s.fom.total_seconds, s.rom.total_seconds);
  std::printf("cycle studies: speedup %.2fx\n", r.speedup());
}

int cmd_experiment(const Flags& f, int id) {
  const RunSpec s = to_spec(f, RunMode::experiment);
  if (id == 1) {
    print_rows(run_experiment_1(s));
  } else if (id == 2) {
    print_degradation(run_experiment_2(s));
  } else if (id == 3) {
    print_degradation(run_experiment_3(s));
  } else {
    throw ConfigError("experiment id must be 1, 2 or 3");
  }
  std::printf("CSV written to %s\n", s.out_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-2D battery cell: full model, reduced model and degradation studies"};
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "full-order discharge at one parameter point");
  add_common(sim, f);
  add_point(sim, f);
  sim->add_flag("--dump", f.dump, "also write the binary state dump");

  auto* off = app.add_subcommand("offline", "train a reduced model and write the artifact");
  add_common(off, f);
  add_point(off, f);
  add_rom(off, f);
  off->add_option("--artifact", f.artifact, "output artifact file");

  auto* rom = app.add_subcommand("rom-run", "reduced discharge at one parameter point");
  add_common(rom, f);
  add_point(rom, f);
  rom->add_option("--artifact", f.artifact, "artifact file")->required();

  double beta = 0.5;
  bool coupled = false;
  auto* cyc = app.add_subcommand("cycle-study", "capacity over cycles under exponential fade of D and L");
  add_common(cyc, f);
  add_point(cyc, f);
  cyc->add_option("--artifact", f.artifact, "use this reduced model (default: full model)");
  cyc->add_option("--beta", beta, "end fraction of the fade")->capture_default_str();
  cyc->add_option("--cycles", f.cycles, "cycle count N")->capture_default_str();
  cyc->add_option("--stride", f.stride, "evaluate every k-th cycle")->capture_default_str();
  cyc->add_flag("--couple", coupled, "fade rate proportional to the charge rate");

  auto* cmp = app.add_subcommand("compare", "full vs reduced errors on a random test set");
  add_common(cmp, f);
  add_point(cmp, f);
  add_test(cmp, f);
  cmp->add_option("--artifact", f.artifact, "artifact file")->required();

  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  add_common(ver, f);

  int exp_id = 1;
  auto* exp = app.add_subcommand("experiment", "experiment drivers (1: charge rate, 2: degradation, 3: coupled)");
  add_common(exp, f);
  add_rom(exp, f);
  add_test(exp, f);
  exp->add_option("id", exp_id, "experiment number")->required();
  exp->add_option("--sizes", f.sizes, "nested basis sizes for experiment 1, \"3,3,5,4;4,4,6,5\"");
  exp->add_option("--betas", f.betas, "fade end fractions for experiment 2")->delimiter(',');
  exp->add_option("--cycles", f.cycles, "cycle count N")->capture_default_str();
  exp->add_option("--stride", f.stride, "evaluate every k-th cycle")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(f);
    if (*off) return cmd_offline(f);
    if (*rom) return cmd_rom_run(f);
    if (*cyc) return cmd_cycle_study(f, beta, coupled, !f.artifact.empty());
    if (*cmp) return cmd_compare(f);
    if (*ver) return cmd_verify(f);
    if (*exp) return cmd_experiment(f, exp_id);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
