// SPDX-License-Identifier: Apache-2.0
#include "p2drom/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "p2drom/mor/reduced_model.hpp"

namespace p2drom {

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kInf = std::numeric_limits<double>::infinity();

// Defaults of the desk-scale drivers. Experiment 1 keeps the training
// tolerance of the charge-rate study for the collateral and caps the bases
// at the largest table size; the cycle studies use a collateral tolerance
// one decade below the basis tolerance (equal tolerances make the
// interpolated Newton system unstable at this scale).
const char* const kExp1Train = "c_rate=0.01:4:5;d=0.5;l=0.5";
const char* const kExp1Test = "c_rate=0.01:4;d=0.5;l=0.5";
const std::vector<std::array<int, 4>> kExp1Sizes = {{3, 3, 5, 4}, {4, 4, 6, 5}, {5, 5, 7, 6}, {6, 6, 8, 7}};
const std::vector<double> kExp1Curves = {0.01, 0.5, 1.0, 2.0, 4.0};

const char* const kExp2Train = "c_rate=1;d=0.05:0.5:4;l=0.05:0.5:4";
const char* const kExp2Test = "c_rate=1;d=0.05:0.5;l=0.05:0.5";
const char* const kExp3Train = "c_rate=0.5,1,2;d=0.05:0.5:4;l=0.05:0.5:4";
const char* const kExp3Test = "c_rate=0.5:2;d=0.05:0.5;l=0.05:0.5";

struct Setup {
  CellConfig cfg;
  PseudoMesh mesh;
  SimulateOptions sim;
  RomOptions rom;
};

Setup make_setup(const RunSpec& spec) {
  Setup s;
  s.cfg = spec.resolved_config();
  s.mesh = build_mesh(spec.macro_nodes, spec.micro_nodes, s.cfg);
  s.sim = simulate_options(s.cfg);
  s.rom = rom_options(s.cfg);
  return s;
}

// Stage-tagged rethrow so a failing driver says where it stopped.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string(name) + ": " + ex.what());
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::string secs(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& file, std::vector<std::filesystem::path>& files) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  files.push_back(file);
  return os;
}

void write_offline_timing(const std::filesystem::path& file, const OfflineReport& r,
                          std::vector<std::filesystem::path>& files) {
  auto os = open_csv(file, files);
  os << "stage,seconds\n";
  os << "fom_training," << secs(r.fom_seconds) << "\n";
  os << "state_bases," << secs(r.basis_seconds) << "\n";
  os << "collateral_and_points," << secs(r.collateral_seconds) << "\n";
  os << "total," << secs(r.total_seconds) << "\n";
}

double trajectory_error(const Trajectory& fom, const Trajectory& rom) {
  if (!rom.failure.empty() || !fom.failure.empty()) return kInf;
  return relative_l2l2_error(fom, rom);
}

void append_curve(std::ofstream& os, const char* runner, const ParameterPoint& mu, const CellConfig& cfg,
                  const PseudoMesh& mesh, const Trajectory& tr) {
  for (const auto& s : tr.states) {
    const double e = cell_voltage(mesh, s.u);
    os << num(mu.c_rate) << ',' << runner << ',' << num(s.time) << ','
       << num(state_of_charge(mesh, s.u, Electrode::cathode)) << ',' << num(e) << ','
       << num(cell_voltage_volts(cfg, e)) << "\n";
  }
}

}  // namespace

Experiment1Report run_experiment_1(const RunSpec& spec) {
  const Setup su = stage("setup", [&] { return make_setup(spec); });
  std::filesystem::create_directories(spec.out_dir);

  Experiment1Report rep;
  const ParameterPoint base = spec.point;
  rep.train = stage("training set", [&] {
    return parse_parameter_grid(spec.train.empty() ? kExp1Train : spec.train, base);
  });
  rep.test = stage("test set", [&] {
    return sample_uniform(parse_parameter_box(spec.test.empty() ? kExp1Test : spec.test, base), spec.test_count,
                          spec.seed);
  });
  const auto sizes = spec.basis_sizes.empty() ? kExp1Sizes : spec.basis_sizes;

  OfflineSettings os;
  os.eps_basis = spec.eps_basis.value_or(0.0);
  os.eps_collateral = spec.eps_collateral.value_or(4e-8);
  os.omega = spec.omega;
  os.threads = spec.threads;
  for (const auto& s : sizes)
    for (int c = 0; c < kComponents; ++c) os.basis_modes[c] = std::max(os.basis_modes[c], s[c]);

  const RomArtifact art =
      stage("offline", [&] { return offline_build(rep.train, su.cfg, su.mesh, su.sim, os, &rep.offline); });

  std::vector<Trajectory> fom(rep.test.size());
  double fom_seconds = 0.0;
  stage("full test solves", [&] {
    for (std::size_t k = 0; k < rep.test.size(); ++k) {
      const auto t0 = Clock::now();
      fom[k] = simulate(rep.test[k], su.cfg, su.mesh, su.sim);
      fom_seconds += since(t0);
      if (!fom[k].failure.empty()) throw std::runtime_error(fom[k].failure);
    }
    return 0;
  });

  for (const auto& size : sizes) {
    stage("reduced test solves", [&] {
      const RomArtifact sub = art.truncated(size);
      ReducedModel model(sub, su.cfg, su.mesh);
      ErrorTableRow row;
      row.basis = sub.basis_sizes();
      row.collateral = sub.collateral_sizes();
      row.fom_seconds = fom_seconds;
      double sum = 0.0;
      for (std::size_t k = 0; k < rep.test.size(); ++k) {
        const auto t0 = Clock::now();
        const RomTrajectory rt = rom_simulate(model, rep.test[k], su.rom);
        row.rom_seconds += since(t0);
        const double e = trajectory_error(fom[k], reconstruct(model, rt));
        if (!std::isfinite(e)) ++row.failures;
        sum += e;
      }
      row.mean_error = sum / static_cast<double>(rep.test.size());
      rep.rows.push_back(row);
      return 0;
    });
  }

  stage("output", [&] {
    auto er = open_csv(spec.out_dir / "exp1_errors.csv", rep.files);
    er << "r1,r2,r3,r4,r_total,m1,m2,m3,m4,mean_error,failures\n";
    for (const auto& r : rep.rows) {
      for (int c = 0; c < 4; ++c) er << r.basis[c] << ',';
      er << r.basis[0] + r.basis[1] + r.basis[2] + r.basis[3] << ',';
      for (int c = 0; c < 4; ++c) er << r.collateral[c] << ',';
      er << num(r.mean_error) << ',' << r.failures << "\n";
    }

    auto tm = open_csv(spec.out_dir / "exp1_timing.csv", rep.files);
    tm << "r_total,fom_seconds,rom_seconds,speedup\n";
    for (const auto& r : rep.rows)
      tm << r.basis[0] + r.basis[1] + r.basis[2] + r.basis[3] << ',' << secs(r.fom_seconds) << ','
         << secs(r.rom_seconds) << ',' << secs(r.rom_seconds > 0 ? r.fom_seconds / r.rom_seconds : 0.0) << "\n";
    write_offline_timing(spec.out_dir / "exp1_offline_timing.csv", rep.offline, rep.files);

    // voltage over capacity at a few charge rates, full model and the largest reduced model
    auto cv = open_csv(spec.out_dir / "exp1_curves.csv", rep.files);
    cv << "c_rate,runner,tau,soc_cathode,voltage,voltage_volts\n";
    const RomArtifact sub = art.truncated(sizes.back());
    ReducedModel model(sub, su.cfg, su.mesh);
    for (double ch : kExp1Curves) {
      ParameterPoint mu = base;
      mu.c_rate = ch;
      append_curve(cv, "fom", mu, su.cfg, su.mesh, simulate(mu, su.cfg, su.mesh, su.sim));
      append_curve(cv, "rom", mu, su.cfg, su.mesh, reconstruct(model, rom_simulate(model, mu, su.rom)));
    }
    return 0;
  });
  return rep;
}

double DegradationReport::worst_capacity_error() const {
  double w = 0.0;
  for (const auto& s : studies) w = std::max(w, s.capacity_error);
  return w;
}

void write_capacity_csv(const std::filesystem::path& file, const std::vector<CycleComparison>& studies) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "label,runner,n,d_value,l_value,c_rate,soc_at_emin\n";
  for (const auto& st : studies)
    for (const CycleStudyResult* r : {&st.fom, &st.rom})
      for (const auto& c : r->cycles)
        os << st.label << ',' << r->runner << ',' << c.cycle << ',' << num(c.parameter.d_scale) << ','
           << num(c.parameter.l_scale) << ',' << num(c.parameter.c_rate) << ','
           << (c.soc_at_emin ? num(*c.soc_at_emin) : "nan") << "\n";
}

namespace {

struct StudyRequest {
  std::string label;
  DegradationSchedule schedule;
  ParameterPoint base;
};

DegradationReport degradation_driver(const RunSpec& spec, const char* prefix, const char* train_default,
                                     const char* test_default, const std::vector<StudyRequest>& requests) {
  const Setup su = stage("setup", [&] { return make_setup(spec); });
  std::filesystem::create_directories(spec.out_dir);
  const std::string pre = prefix;

  DegradationReport rep;
  const ParameterPoint base = spec.point;
  rep.train = stage("training set", [&] {
    return parse_parameter_grid(spec.train.empty() ? train_default : spec.train, base);
  });
  rep.test = stage("test set", [&] {
    return sample_uniform(parse_parameter_box(spec.test.empty() ? test_default : spec.test, base),
                          spec.test_count, spec.seed);
  });

  OfflineSettings os;
  os.eps_basis = spec.eps_basis.value_or(1e-5);
  os.eps_collateral = spec.eps_collateral.value_or(1e-6);
  os.omega = spec.omega;
  os.threads = spec.threads;
  const RomArtifact art =
      stage("offline", [&] { return offline_build(rep.train, su.cfg, su.mesh, su.sim, os, &rep.offline); });
  rep.basis = art.basis_sizes();
  rep.collateral = art.collateral_sizes();
  ReducedModel model(art, su.cfg, su.mesh);

  stage("test errors", [&] {
    double sum = 0.0;
    for (const auto& mu : rep.test) {
      const Trajectory f = simulate(mu, su.cfg, su.mesh, su.sim);
      const double e = trajectory_error(f, reconstruct(model, rom_simulate(model, mu, su.rom)));
      rep.test_errors.push_back(e);
      sum += e;
    }
    rep.mean_test_error = rep.test.empty() ? 0.0 : sum / static_cast<double>(rep.test.size());
    return 0;
  });

  const auto cycles = sample_cycles(spec.n_cycles, spec.cycle_stride);
  const DischargeRunner fom = fom_runner(su.cfg, su.mesh, su.sim);
  const DischargeRunner rom = rom_runner(model, su.rom);
  for (const auto& rq : requests) {
    stage(("cycle study " + rq.label).c_str(), [&] {
      CycleComparison cmp;
      cmp.label = rq.label;
      cmp.schedule = rq.schedule;
      cmp.base = rq.base;
      cmp.fom = run_cycle_study(rq.schedule, fom, rq.base, cycles, "fom");
      cmp.rom = run_cycle_study(rq.schedule, rom, rq.base, cycles, "rom");
      cmp.capacity_error = capacity_curve_error(cmp.fom, cmp.rom);
      rep.fom_seconds += cmp.fom.total_seconds;
      rep.rom_seconds += cmp.rom.total_seconds;
      rep.studies.push_back(std::move(cmp));
      return 0;
    });
  }

  stage("output", [&] {
    const auto cap = spec.out_dir / (pre + "_capacity.csv");
    write_capacity_csv(cap, rep.studies);
    rep.files.push_back(cap);

    auto sm = open_csv(spec.out_dir / (pre + "_summary.csv"), rep.files);
    sm << "label,beta,coupled,capacity_error,fom_failures,rom_failures,fom_monotone,rom_monotone\n";
    for (const auto& s : rep.studies) {
      auto failures = [](const CycleStudyResult& r) {
        return std::count_if(r.cycles.begin(), r.cycles.end(), [](const CycleRecord& c) { return !c.failure.empty(); });
      };
      sm << s.label << ',' << num(s.schedule.beta) << ',' << (s.schedule.couple_c_rate ? 1 : 0) << ','
         << num(s.capacity_error) << ',' << failures(s.fom) << ',' << failures(s.rom) << ','
         << (s.fom.non_monotone ? 0 : 1) << ',' << (s.rom.non_monotone ? 0 : 1) << "\n";
    }

    auto te = open_csv(spec.out_dir / (pre + "_test_errors.csv"), rep.files);
    te << "c_rate,d_scale,l_scale,error\n";
    for (std::size_t k = 0; k < rep.test.size(); ++k)
      te << num(rep.test[k].c_rate) << ',' << num(rep.test[k].d_scale) << ',' << num(rep.test[k].l_scale) << ','
         << num(rep.test_errors[k]) << "\n";
    te << "mean,,," << num(rep.mean_test_error) << "\n";

    auto tm = open_csv(spec.out_dir / (pre + "_timing.csv"), rep.files);
    tm << "label,fom_seconds,rom_seconds,speedup\n";
    for (const auto& s : rep.studies)
      tm << s.label << ',' << secs(s.fom.total_seconds) << ',' << secs(s.rom.total_seconds) << ','
         << secs(s.rom.total_seconds > 0 ? s.fom.total_seconds / s.rom.total_seconds : 0.0) << "\n";
    tm << "all," << secs(rep.fom_seconds) << ',' << secs(rep.rom_seconds) << ',' << secs(rep.speedup()) << "\n";
    write_offline_timing(spec.out_dir / (pre + "_offline_timing.csv"), rep.offline, rep.files);
    return 0;
  });
  return rep;
}

std::string label_of(const char* key, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s=%g", key, v);
  return buf;
}

}  // namespace

DegradationReport run_experiment_2(const RunSpec& spec) {
  std::vector<StudyRequest> rq;
  for (double beta : spec.betas) {
    DegradationSchedule s;
    s.beta = beta;
    s.n_total = spec.n_cycles;
    s.f0 = 0.5;
    rq.push_back({label_of("beta", beta), s, {1.0, 0.5, 0.5}});
  }
  return degradation_driver(spec, "exp2", kExp2Train, kExp2Test, rq);
}

DegradationReport run_experiment_3(const RunSpec& spec, std::vector<double> c_rates, double beta) {
  std::vector<StudyRequest> rq;
  for (double ch : c_rates) {
    DegradationSchedule s;
    s.beta = beta;
    s.n_total = spec.n_cycles;
    s.f0 = 0.5;
    s.couple_c_rate = true;
    rq.push_back({label_of("c_rate", ch), s, {ch, 0.5, 0.5}});
  }
  return degradation_driver(spec, "exp3", kExp3Train, kExp3Test, rq);
}

}  // namespace p2drom
