// SPDX-License-Identifier: Apache-2.0
#include "p2drom/degradation/cycle_study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "p2drom/mor/reduced_model.hpp"

namespace p2drom {

void DegradationSchedule::validate() const {
  if (!(f0 > 0.0)) throw ConfigError("degradation F0 must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("degradation beta must lie in (0,1)");
  if (n_total < 1) throw ConfigError("cycle count must be at least 1");
}

double schedule_eval(int n, const DegradationSchedule& s, double c_rate, bool* extrapolated) {
  s.validate();
  if (extrapolated) *extrapolated = n < 0 || n > s.n_total;
  const double c = s.couple_c_rate ? c_rate : 1.0;
  // beta^(c n / N) is exp(c ln(beta) n / N); pow keeps n = 0 and n = N exact
  return s.f0 * std::pow(s.beta, c * n / s.n_total);
}

ParameterPoint cycle_parameter(int n, const DegradationSchedule& s, const ParameterPoint& base) {
  ParameterPoint mu = base;
  const double v = schedule_eval(n, s, base.c_rate);
  if (s.target != DegradationTarget::reaction_rate) mu.d_scale = v;
  if (s.target != DegradationTarget::diffusion) mu.l_scale = v;
  return mu;
}

DischargeRunner fom_runner(const CellConfig& cfg, const PseudoMesh& mesh, const SimulateOptions& opt, bool curves) {
  return [cfg, mesh, opt, curves](const ParameterPoint& mu) {
    const Trajectory tr = simulate(mu, cfg, mesh, opt);
    DischargeOutcome out;
    out.soc_at_emin = tr.soc_at_emin;
    out.failure = tr.failure;
    if (tr.failure.empty() && !tr.reached_e_min) out.failure = "E_min not reached";
    if (curves)
      for (const auto& s : tr.states)
        out.curve.emplace_back(state_of_charge(mesh, s.u, Electrode::cathode), cell_voltage(mesh, s.u));
    return out;
  };
}

DischargeRunner rom_runner(ReducedModel& model, const RomOptions& opt, bool curves) {
  return [&model, opt, curves](const ParameterPoint& mu) {
    const RomTrajectory rt = rom_simulate(model, mu, opt);
    DischargeOutcome out;
    out.soc_at_emin = rt.soc_at_emin;
    out.failure = rt.failure;
    if (rt.failure.empty() && !rt.reached_e_min) out.failure = "E_min not reached";
    if (curves) {
      for (const auto& s : rt.states) {
        const Vec u = model.lift(s.coeffs);
        out.curve.emplace_back(state_of_charge(model.mesh(), u, Electrode::cathode), cell_voltage(model.mesh(), u));
      }
    }
    return out;
  };
}

std::vector<int> sample_cycles(int n_total, int stride) {
  if (n_total < 0 || stride < 1) throw std::invalid_argument("bad cycle sampling");
  std::vector<int> out;
  for (int n = 0; n <= n_total; n += stride) out.push_back(n);
  if (out.back() != n_total) out.push_back(n_total);
  return out;
}

CycleStudyResult run_cycle_study(const DegradationSchedule& s, const DischargeRunner& runner,
                                 const ParameterPoint& base, const std::vector<int>& cycles,
                                 const std::string& runner_name) {
  s.validate();
  CycleStudyResult res;
  res.runner = runner_name;
  const auto t_all = std::chrono::steady_clock::now();
  for (int n : cycles) {
    if (n < 0 || n > s.n_total) throw std::invalid_argument("sampled cycle outside 0..N");
    CycleRecord rec;
    rec.cycle = n;
    rec.parameter = cycle_parameter(n, s, base);
    const auto t0 = std::chrono::steady_clock::now();
    DischargeOutcome out;
    try {
      out = runner(rec.parameter);
    } catch (const std::exception& ex) {
      out.failure = ex.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.soc_at_emin = out.soc_at_emin;
    rec.curve = std::move(out.curve);
    rec.failure = std::move(out.failure);
    res.cycles.push_back(std::move(rec));
  }
  res.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_all).count();

  std::optional<double> last;
  for (const auto& r : res.cycles) {
    if (!r.soc_at_emin) continue;
    if (last && *r.soc_at_emin > *last + 1e-9) res.non_monotone = true;
    last = r.soc_at_emin;
  }
  return res;
}

double relative_l2l2_error(const Trajectory& fom, const Trajectory& rom) {
  const std::size_t n = std::min(fom.states.size(), rom.states.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (fom.states[k].u.size() != rom.states[k].u.size())
      throw std::invalid_argument("trajectories live on different meshes");
    num += (fom.states[k].u - rom.states[k].u).squaredNorm();
    den += rom.states[k].u.squaredNorm();
  }
  if (!(den > 0.0)) throw std::domain_error("reduced trajectory has zero norm");
  return std::sqrt(num / den);
}

double relative_l2l2_error(const std::vector<Trajectory>& fom, const std::vector<Trajectory>& rom) {
  if (fom.size() != rom.size() || fom.empty()) throw std::invalid_argument("test sets differ in size");
  double s = 0.0;
  for (std::size_t k = 0; k < fom.size(); ++k) s += relative_l2l2_error(fom[k], rom[k]);
  return s / static_cast<double>(fom.size());
}

double capacity_curve_error(const CycleStudyResult& fom, const CycleStudyResult& rom) {
  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& f : fom.cycles) {
    if (!f.soc_at_emin) continue;
    for (const auto& r : rom.cycles) {
      if (r.cycle != f.cycle) continue;
      if (!r.soc_at_emin) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(*r.soc_at_emin - *f.soc_at_emin) / std::abs(*f.soc_at_emin));
      ++matched;
    }
  }
  if (matched == 0) throw std::invalid_argument("no common cycles to compare");
  return worst;
}

void write_cycle_study_csv(const std::filesystem::path& file, const CycleStudyResult& r) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "n,d_value,l_value,c_rate,soc_at_emin\n";
  char line[200];
  for (const auto& c : r.cycles) {
    std::snprintf(line, sizeof(line), "%d,%.12e,%.12e,%.6f,", c.cycle, c.parameter.d_scale, c.parameter.l_scale,
                  c.parameter.c_rate);
    os << line;
    if (c.soc_at_emin) {
      std::snprintf(line, sizeof(line), "%.12e\n", *c.soc_at_emin);
      os << line;
    } else {
      os << "nan\n";
    }
  }
}

void write_cycle_timing_csv(const std::filesystem::path& file, const CycleStudyResult& r) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "n,runner,wall_seconds\n";
  char line[96];
  for (const auto& c : r.cycles) {
    std::snprintf(line, sizeof(line), "%d,%s,%.6f\n", c.cycle, r.runner.c_str(), c.wall_seconds);
    os << line;
  }
}

}  // namespace p2drom
