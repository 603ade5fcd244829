// SPDX-License-Identifier: Apache-2.0
#include "p2drom/cli/checks.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>

#include "p2drom/cli/experiments.hpp"
#include "p2drom/degradation/cycle_study.hpp"
#include "p2drom/model/material.hpp"
#include "p2drom/mor/offline.hpp"
#include "p2drom/mor/reduced_model.hpp"

namespace p2drom {

namespace {

// Tolerances of the verification gate.
constexpr double kEquilibriumTol = 1e-10;
constexpr double kCapacityTol = 5e-3;
constexpr double kJacobianTol = 1e-6;
constexpr double kOcpTol = 0.02;
constexpr double kMaterialTol = 1e-6;
constexpr double kPodTol = 1e-9;
constexpr double kInterpTol = 1e-10;
constexpr double kReproductionTol = 1e-6;
constexpr double kTable1Tol = 1e-3;
constexpr double kCycleTol = 1e-2;
constexpr double kSpeedupFloor = 5.0;

CheckResult result(const char* name, double measured, double tol, std::string detail = {}) {
  CheckResult r;
  r.name = name;
  r.measured = measured;
  r.tolerance = tol;
  r.pass = std::isfinite(measured) && measured < tol;
  r.detail = std::move(detail);
  return r;
}

template <class F>
CheckResult guarded(const char* name, double tol, F&& f) {
  try {
    return f();
  } catch (const std::exception& ex) {
    CheckResult r = result(name, std::numeric_limits<double>::infinity(), tol, std::string("error: ") + ex.what());
    r.pass = false;
    return r;
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

struct Uniform {
  std::mt19937_64 rng;
  explicit Uniform(std::uint64_t seed) : rng(seed) {}
  double operator()() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
  double sym() { return 2.0 * (*this)() - 1.0; }
};

Mat random_matrix(Eigen::Index m, Eigen::Index n, Uniform& u) {
  Mat a(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = u.sym();
  return a;
}

// m x n matrix with prescribed singular values 10^(-decades k / n)
Mat graded_matrix(Eigen::Index m, Eigen::Index n, double decades, Uniform& u) {
  const Eigen::Index k = std::min(m, n);
  Eigen::HouseholderQR<Mat> q1(random_matrix(m, k, u)), q2(random_matrix(n, k, u));
  const Mat Q1 = q1.householderQ() * Mat::Identity(m, k);
  const Mat Q2 = q2.householderQ() * Mat::Identity(n, k);
  Vec s(k);
  for (Eigen::Index i = 0; i < k; ++i) s[i] = std::pow(10.0, -decades * static_cast<double>(i) / k);
  return Q1 * s.asDiagonal() * Q2.transpose();
}

Trajectory reference_run(const CheckContext& ctx, double c_rate) {
  Trajectory tr = simulate({c_rate, 0.5, 0.5}, ctx.cfg, ctx.mesh, ctx.sim);
  if (!tr.failure.empty()) throw std::runtime_error("reference discharge failed: " + tr.failure);
  return tr;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

bool is_timing(const std::filesystem::path& p) { return p.filename().string().find("timing") != std::string::npos; }

}  // namespace

CheckContext CheckContext::from(const RunSpec& spec) {
  CheckContext c;
  c.spec = spec;
  c.cfg = spec.resolved_config();
  c.mesh = build_mesh(spec.macro_nodes, spec.micro_nodes, c.cfg);
  c.sim = simulate_options(c.cfg);
  c.scratch_dir = spec.out_dir;
  c.seed = spec.seed;
  return c;
}

CheckResult check_equilibrium(const CheckContext& ctx) {
  return guarded("equilibrium", kEquilibriumTol, [&] {
    Discretization disc(ctx.cfg, ctx.mesh);
    disc.set_parameter({0.0, 0.5, 0.5}, ctx.sim.dt);
    const Vec u0 = initial_state(ctx.cfg, ctx.mesh).u;
    Vec r;
    disc.residual(u0, u0, r);
    const double res = r.norm();

    SimulateOptions opt = ctx.sim;
    opt.t_end = 10 * opt.dt;
    const Trajectory tr = simulate({0.0, 0.5, 0.5}, ctx.cfg, ctx.mesh, opt);
    if (!tr.failure.empty()) throw std::runtime_error(tr.failure);
    if (tr.states.size() != 11) throw std::runtime_error("equilibrium run stopped early");
    double drift = 0.0;
    for (const auto& s : tr.states) drift = std::max(drift, (s.u - u0).lpNorm<Eigen::Infinity>());
    return result("equilibrium", std::max(res, drift), kEquilibriumTol,
                  fmt("residual %.3e, max drift over 10 steps %.3e", res, drift));
  });
}

CheckResult check_capacity_balance(const CheckContext& ctx) {
  return guarded("capacity_balance", kCapacityTol, [&] {
    const Trajectory tr = reference_run(ctx, 1.0);
    const double y0 = state_of_charge(ctx.mesh, tr.states.front().u, Electrode::cathode);
    double worst = 0.0;
    for (const auto& s : tr.states)
      worst = std::max(worst, std::abs(state_of_charge(ctx.mesh, s.u, Electrode::cathode) - y0 - s.time));
    return result("capacity_balance", worst, kCapacityTol,
                  fmt("%.0f accepted steps at C_h = 1", static_cast<double>(tr.states.size() - 1)));
  });
}

CheckResult check_jacobian_fd(const CheckContext& ctx, double corrupt) {
  return guarded("jacobian_fd", kJacobianTol, [&] {
    const Trajectory tr = reference_run(ctx, 1.0);
    Discretization disc(ctx.cfg, ctx.mesh);
    disc.set_parameter(tr.parameter, tr.dt);
    const int last = static_cast<int>(tr.states.size()) - 1;
    const int picks[5] = {1, std::max(1, last / 4), std::max(1, last / 2), std::max(1, 3 * last / 4), last};

    Uniform rnd(ctx.seed);
    const double h = 1e-6;
    double worst = 0.0;
    Vec rp, rm;
    SpMat jac;
    for (int t : picks) {
      const Vec& u = tr.states[t].u;
      const Vec& up = tr.states[t - 1].u;
      disc.jacobian(u, up, jac);
      if (corrupt != 0.0) jac.coeffRef(disc.collector_dof(), disc.collector_dof()) *= 1.0 + corrupt;
      for (int d = 0; d < 20; ++d) {
        Vec v(u.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rnd.sym();
        disc.residual(u + h * v, up, rp);
        disc.residual(u - h * v, up, rm);
        const Vec fd = (rp - rm) / (2.0 * h);
        const Vec jv = jac * v;
        worst = std::max(worst, (fd - jv).norm() / std::max(jv.norm(), 1e-300));
      }
    }
    return result("jacobian_fd", worst, kJacobianTol, "20 directions x 5 states, central differences");
  });
}

CheckResult check_ocp_limit(const CheckContext& ctx) {
  return guarded("ocp_limit", kOcpTol, [&] {
    const Trajectory tr = reference_run(ctx, 0.01);
    auto ocp = [&](const Vec& u) {
      return open_circuit_voltage(ctx.cfg, state_of_charge(ctx.mesh, u, Electrode::anode),
                                  state_of_charge(ctx.mesh, u, Electrode::cathode));
    };
    const double scale = std::abs(ocp(tr.states.front().u));
    double worst = 0.0, worst_local = 0.0;
    for (const auto& s : tr.states) {
      const double o = ocp(s.u);
      const double dev = std::abs(cell_voltage(ctx.mesh, s.u) - o);
      worst = std::max(worst, dev / scale);
      if (std::abs(o) > 0.1 * scale) worst_local = std::max(worst_local, dev / std::abs(o));
    }
    return result("ocp_limit", worst, kOcpTol,
                  fmt("relative to |OCP(0)| = %.4f; pointwise away from the zero crossing %.3e", scale,
                      worst_local));
  });
}

CheckResult check_material_identities(const CheckContext& ctx) {
  return guarded("material_identities", kMaterialTol, [&] {
    const double g = ctx.cfg.cathode.enthalpy_gamma;
    const auto& el = ctx.cfg.electrolyte;
    const double nref = ctx.cfg.n_electrolyte_ref;
    const double h = 1e-6;
    double worst = 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    for (double y : {0.05, 0.2, 0.5, 0.8, 0.95}) {
      // Gamma / y is the derivative of the chemical potential
      const double dfa = (f_active(y + h, g) - f_active(y - h, g)) / (2 * h);
      worst = std::max(worst, rel(dfa, gamma_active(y, g) / y));
      worst = std::max(worst, rel(logistic(logit(y)), y));
      const double dbv = (butler_volmer_g(y + h, 0.5) - butler_volmer_g(y - h, 0.5)) / (2 * h);
      worst = std::max(worst, rel(dbv, butler_volmer_dg(y, 0.5)));
    }
    for (double y : {0.01, 0.05, 0.1, 0.2, 0.3}) {
      const double dfe = (f_electrolyte(y + h, el.solvation_number) - f_electrolyte(y - h, el.solvation_number)) / (2 * h);
      worst = std::max(worst, rel(dfe, gamma_electrolyte(y, el.solvation_number) / y));
      const double dn = (electrolyte_salt(y + h, el, nref) - electrolyte_salt(y - h, el, nref)) / (2 * h);
      worst = std::max(worst, rel(dn, electrolyte_capacity(y, el, nref)));
    }
    return result("material_identities", worst, kMaterialTol, "chemical potentials, storage capacity, kinetics");
  });
}

CheckResult check_pod_oracle(const CheckContext& ctx) {
  return guarded("pod_hapod_oracle", kPodTol, [&] {
    Uniform rnd(ctx.seed);
    std::vector<Mat> sets;
    sets.push_back(graded_matrix(500, 100, 12.0, rnd));
    sets.push_back(graded_matrix(200, 60, 6.0, rnd));
    sets.push_back(graded_matrix(80, 120, 10.0, rnd));
    const Trajectory tr = reference_run(ctx, 1.0);
    for (int c = 0; c < kComponents; ++c) sets.push_back(component_snapshots(tr, ctx.mesh, static_cast<Component>(c)));

    double worst = 0.0;
    bool bound_ok = true, count_ok = true;
    std::string why;
    for (const Mat& S : sets) {
      const double nrm = S.norm();
      const Vec sv = Eigen::JacobiSVD<Mat>(S).singularValues();
      for (double eps : {1e-2, 1e-4, 1e-6}) {
        const BasisMatrix b = pod(S, eps);
        const double predicted = std::sqrt(sv.tail(sv.size() - b.size()).squaredNorm());
        worst = std::max(worst, std::abs(projection_error(b.modes, S) - predicted) / nrm);

        std::vector<Mat> chunks;
        const Eigen::Index step = (S.cols() + 3) / 4;
        for (Eigen::Index j = 0; j < S.cols(); j += step)
          chunks.push_back(S.middleCols(j, std::min(step, S.cols() - j)));
        const BasisMatrix hb = hapod_incremental(chunks, eps, 0.9);
        const double herr = projection_error(hb.modes, S) / nrm;
        if (herr > eps * (1.0 + 1e-12)) {
          bound_ok = false;
          why += fmt(" HAPOD error %.3e > eps %.1e;", herr, eps);
        }
        if (hb.size() < b.size()) {
          count_ok = false;
          why += fmt(" HAPOD %g modes < POD %g;", hb.size(), b.size());
        }
      }
    }
    CheckResult r = result("pod_hapod_oracle", worst, kPodTol,
                           "3 graded random matrices (up to 500x100) and 4 snapshot sets, eps 1e-2..1e-6" + why);
    r.pass = r.pass && bound_ok && count_ok;
    return r;
  });
}

CheckResult check_interpolation_exactness(const CheckContext& ctx) {
  return guarded("interpolation_exactness", kInterpTol, [&] {
    Uniform rnd(ctx.seed + 1);
    std::vector<Mat> bases;
    bases.push_back(pod(graded_matrix(300, 40, 8.0, rnd), 1e-10).modes);
    const Trajectory rec = simulate({1.0, 0.5, 0.5}, ctx.cfg, ctx.mesh, [&] {
      SimulateOptions o = ctx.sim;
      o.newton.record_iterates = true;
      return o;
    }());
    const auto ops = collect_operator_snapshots(rec, ctx.cfg, ctx.mesh);
    for (const auto& set : ops) bases.push_back(pod(set, 1e-8).modes);

    double worst = 0.0;
    for (const Mat& U : bases) {
      const InterpolationPoints pts = greedy_points(U);
      for (Eigen::Index k = 0; k < U.cols(); ++k) {
        const Vec col = U.col(k);
        worst = std::max(worst, (interpolate(U, pts, col) - col).lpNorm<Eigen::Infinity>() /
                                    col.lpNorm<Eigen::Infinity>());
      }
      for (int t = 0; t < 5; ++t) {
        Vec c(U.cols());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rnd.sym();
        const Vec v = U * c;
        worst = std::max(worst, (interpolate(U, pts, v) - v).lpNorm<Eigen::Infinity>() / v.lpNorm<Eigen::Infinity>());
      }
    }
    return result("interpolation_exactness", worst, kInterpTol,
                  "every collateral mode and random span elements, random and operator bases");
  });
}

CheckResult check_rom_reproduction(const CheckContext& ctx) {
  return guarded("rom_exact_reproduction", kReproductionTol, [&] {
    const ParameterPoint mu{1.0, 0.5, 0.5};
    OfflineSettings os;
    os.eps_basis = 0.0;
    os.eps_collateral = 0.0;
    const RomArtifact art = offline_build(std::vector<ParameterPoint>{mu}, ctx.cfg, ctx.mesh, ctx.sim, os);
    ReducedModel model(art, ctx.cfg, ctx.mesh);
    const RomTrajectory rt = rom_simulate(model, mu, rom_options(ctx.cfg));
    if (!rt.failure.empty()) throw std::runtime_error(rt.failure);
    const Trajectory fom = reference_run(ctx, 1.0);
    const double e = relative_l2l2_error(fom, reconstruct(model, rt));
    const auto b = art.basis_sizes();
    const auto m = art.collateral_sizes();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "bases (%d,%d,%d,%d), collateral (%d,%d,%d,%d), %zu/%zu steps", b[0], b[1], b[2],
                  b[3], m[0], m[1], m[2], m[3], rt.states.size(), fom.states.size());
    CheckResult r = result("rom_exact_reproduction", e, kReproductionTol, buf);
    r.pass = r.pass && rt.states.size() == fom.states.size();
    return r;
  });
}

CheckResult check_table1_trend(const CheckContext& ctx) {
  return guarded("table1_trend", kTable1Tol, [&] {
    RunSpec spec = ctx.spec;
    spec.out_dir = ctx.scratch_dir / "table1";
    const Experiment1Report rep = run_experiment_1(spec);
    bool monotone = true;
    std::string detail = "errors";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      detail += fmt(" %.3e", rep.rows[k].mean_error);
      if (k > 0 && !(rep.rows[k].mean_error < rep.rows[k - 1].mean_error)) monotone = false;
    }
    detail += monotone ? " (monotone)" : " (NOT monotone)";
    CheckResult r = result("table1_trend", rep.rows.back().mean_error, kTable1Tol, detail);
    r.pass = r.pass && monotone && rep.rows.size() >= 4;
    return r;
  });
}

CheckResult check_schedules(const CheckContext& ctx) {
  return guarded("degradation_schedules", 1.0, [&] {
    double worst = 0.0;
    for (bool coupled : {false, true})
      for (double beta : {0.1, 0.5, 0.6, 0.9})
        for (int n_total : {1, 50, 1000}) {
          DegradationSchedule s;
          s.f0 = 0.5;
          s.beta = beta;
          s.n_total = n_total;
          s.couple_c_rate = coupled;
          const double f0 = schedule_eval(0, s, 1.0);
          const double fn = schedule_eval(n_total, s, 1.0);
          worst = std::max({worst, std::abs(f0 - s.f0) / s.f0, std::abs(fn - beta * s.f0) / (beta * s.f0)});
        }
    // the coupled schedule at C_h = 1 has to reproduce the uncoupled study exactly
    DegradationSchedule plain;
    plain.beta = 0.6;
    plain.n_total = ctx.spec.n_cycles;
    DegradationSchedule coupled = plain;
    coupled.couple_c_rate = true;
    const auto cycles = sample_cycles(plain.n_total, std::max(1, plain.n_total / 10));
    const DischargeRunner fom = fom_runner(ctx.cfg, ctx.mesh, ctx.sim);
    const auto a = run_cycle_study(plain, fom, {1.0, 0.5, 0.5}, cycles, "fom");
    const auto b = run_cycle_study(coupled, fom, {1.0, 0.5, 0.5}, cycles, "fom");
    const auto dir = ctx.scratch_dir / "schedules";
    std::filesystem::create_directories(dir);
    write_cycle_study_csv(dir / "exp2_like.csv", a);
    write_cycle_study_csv(dir / "exp3_like.csv", b);
    const bool identical = slurp(dir / "exp2_like.csv") == slurp(dir / "exp3_like.csv");
    bool values_equal = a.cycles.size() == b.cycles.size();
    for (std::size_t k = 0; values_equal && k < a.cycles.size(); ++k)
      values_equal = a.cycles[k].soc_at_emin == b.cycles[k].soc_at_emin &&
                     a.cycles[k].parameter == b.cycles[k].parameter;

    CheckResult r;
    r.name = "degradation_schedules";
    r.measured = worst;
    r.tolerance = 0.0;
    r.pass = worst == 0.0 && identical && values_equal;
    r.detail = fmt("max relative endpoint deviation %.1e; coupled C_h = 1 study bitwise equal: ", worst) +
               (identical && values_equal ? "yes" : "no");
    return r;
  });
}

CheckResult check_cycle_consistency(const CheckContext& ctx) {
  return guarded("cycle_study_consistency", kCycleTol, [&] {
    RunSpec spec = ctx.spec;
    spec.out_dir = ctx.scratch_dir / "cycles";
    const DegradationReport rep = run_experiment_2(spec);
    const double err = rep.worst_capacity_error();
    const double speedup = rep.speedup();
    CheckResult r = result("cycle_study_consistency", err, kCycleTol,
                           fmt("N = %g, ROM speedup %.2fx (floor %.0fx)", spec.n_cycles, speedup, kSpeedupFloor));
    r.pass = r.pass && speedup >= kSpeedupFloor;
    return r;
  });
}

CheckResult check_determinism(const CheckContext& ctx) {
  return guarded("determinism", 1.0, [&] {
    std::vector<std::filesystem::path> files[2];
    for (int run = 0; run < 2; ++run) {
      RunSpec spec = ctx.spec;
      spec.out_dir = ctx.scratch_dir / (run == 0 ? "determinism_a" : "determinism_b");
      spec.test_count = 4;
      for (const auto& f : run_experiment_1(spec).files) files[run].push_back(f);
      spec.betas = {0.5};
      spec.n_cycles = 10;
      for (const auto& f : run_experiment_2(spec).files) files[run].push_back(f);
    }
    if (files[0].size() != files[1].size()) throw std::runtime_error("runs wrote different file sets");
    int compared = 0, differing = 0;
    std::string which;
    for (std::size_t k = 0; k < files[0].size(); ++k) {
      if (is_timing(files[0][k])) continue;
      ++compared;
      if (slurp(files[0][k]) != slurp(files[1][k])) {
        ++differing;
        which += " " + files[0][k].filename().string();
      }
    }
    CheckResult r;
    r.name = "determinism";
    r.measured = differing;
    r.tolerance = 0.0;
    r.pass = differing == 0 && compared > 0;
    r.detail = fmt("%g data CSVs compared across two seeded runs, %g differ", compared, differing) + which;
    return r;
  });
}

std::vector<CheckResult> verify_suite(const CheckContext& ctx) {
  return {check_material_identities(ctx), check_jacobian_fd(ctx),        check_equilibrium(ctx),
          check_capacity_balance(ctx),    check_pod_oracle(ctx),         check_interpolation_exactness(ctx),
          check_rom_reproduction(ctx)};
}

void write_check_csv(const std::filesystem::path& file, const std::vector<CheckResult>& checks) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "name,pass,measured,tolerance,detail\n";
  char buf[64];
  for (const auto& c : checks) {
    std::string d = c.detail;
    std::replace(d.begin(), d.end(), ',', ';');
    std::snprintf(buf, sizeof(buf), "%.6e,%.6e", c.measured, c.tolerance);
    os << c.name << ',' << (c.pass ? 1 : 0) << ',' << buf << ',' << d << "\n";
  }
}

}  // namespace p2drom
