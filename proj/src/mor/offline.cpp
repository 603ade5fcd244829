// SPDX-License-Identifier: Apache-2.0
#include "p2drom/mor/offline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace p2drom {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string describe(const ParameterPoint& mu) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "(C_h = %g, D = %g, L = %g)", mu.c_rate, mu.d_scale, mu.l_scale);
  return buf;
}

BasisMatrix compress(const std::vector<Mat>& chunks, double eps, double omega, int max_modes, bool hapod) {
  if (hapod) return hapod_incremental(chunks, eps, omega, max_modes);
  Eigen::Index cols = 0;
  for (const auto& c : chunks) cols += c.cols();
  Mat all(chunks.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& c : chunks) {
    all.middleCols(at, c.cols()) = c;
    at += c.cols();
  }
  return pod(all, eps, max_modes);
}

}  // namespace

std::vector<Trajectory> training_trajectories(const std::vector<ParameterPoint>& train, const CellConfig& cfg,
                                              const PseudoMesh& mesh, SimulateOptions sim, int threads) {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  sim.newton.record_iterates = true;
  std::vector<Trajectory> out(train.size());
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(train.size())));

  // each slot is written by exactly one worker; results do not depend on scheduling
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < train.size(); k = next++) out[k] = simulate(train[k], cfg, mesh, sim);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (std::size_t k = 0; k < train.size(); ++k)
    if (!out[k].failure.empty())
      throw std::runtime_error("training solve failed at " + describe(train[k]) + ": " + out[k].failure);
  return out;
}

RomArtifact offline_build(const std::vector<Trajectory>& trajectories, const CellConfig& cfg,
                          const PseudoMesh& mesh, const OfflineSettings& settings, OfflineReport* report) {
  if (trajectories.empty()) throw std::invalid_argument("training set is empty");
  const auto t0 = Clock::now();
  RomArtifact art;
  art.config_text = to_key_values(cfg);
  art.config_hash = cfg.hash();
  art.mesh_signature = mesh.signature();
  art.macro_nodes = mesh.nodes_per_region();
  art.micro_nodes = mesh.micro_nodes();
  art.dt = trajectories.front().dt;
  art.eps_basis = settings.eps_basis;
  art.eps_collateral = settings.eps_collateral;
  art.omega = settings.omega;
  art.newton_stages = settings.newton_stages;
  for (const auto& tr : trajectories) art.train.push_back(tr.parameter);

  OfflineReport rep;
  for (const auto& tr : trajectories) rep.snapshot_count += static_cast<long>(tr.states.size());

  for (int c = 0; c < kComponents; ++c) {
    const Component comp = static_cast<Component>(c);
    auto tb = Clock::now();
    std::vector<Mat> chunks;
    for (const auto& tr : trajectories) chunks.push_back(component_snapshots(tr, mesh, comp));
    art.comp[c].basis =
        compress(chunks, settings.eps_basis, settings.omega, settings.basis_modes[c], settings.use_hapod);
    rep.basis_seconds += since(tb);
  }

  // operator images, one chunk per training trajectory
  auto tc = Clock::now();
  std::array<std::vector<Mat>, 4> gchunks;
  for (const auto& tr : trajectories) {
    auto sets = collect_operator_snapshots(tr, cfg, mesh, settings.newton_stages);
    rep.operator_snapshot_count += static_cast<long>(sets[0].size());
    for (int c = 0; c < kComponents; ++c) gchunks[c].push_back(std::move(sets[c].columns));
  }
  for (int c = 0; c < kComponents; ++c) {
    RomComponent& rc = art.comp[c];
    rc.collateral = compress(gchunks[c], settings.eps_collateral, settings.omega, settings.collateral_modes[c],
                             settings.use_hapod);
    rc.points = greedy_points(rc.collateral.modes);
    finalize_component(rc);
    rep.point_conditions[c] = rc.points.condition;
  }
  rep.collateral_seconds = since(tc);
  rep.total_seconds = since(t0);
  if (report) {
    rep.fom_seconds = report->fom_seconds;
    rep.total_seconds += rep.fom_seconds;
    *report = rep;
  }
  return art;
}

RomArtifact offline_build(const std::vector<ParameterPoint>& train, const CellConfig& cfg, const PseudoMesh& mesh,
                          const SimulateOptions& sim, const OfflineSettings& settings, OfflineReport* report) {
  const auto t0 = Clock::now();
  const auto trajs = training_trajectories(train, cfg, mesh, sim, settings.threads);
  OfflineReport rep;
  rep.fom_seconds = since(t0);
  RomArtifact art = offline_build(trajs, cfg, mesh, settings, &rep);
  if (report) *report = rep;
  return art;
}

}  // namespace p2drom
