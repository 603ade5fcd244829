// SPDX-License-Identifier: Apache-2.0
#include "p2drom/mor/interpolation.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <limits>
#include <stdexcept>
#include <string>

namespace p2drom {

namespace {

Eigen::Index argmax_abs(const Vec& v) {
  Eigen::Index best = 0;
  double m = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > m) {  // strict: first index wins ties
      m = std::abs(v[i]);
      best = i;
    }
  }
  return best;
}

double condition_number(const Mat& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& s = svd.singularValues();
  return s[s.size() - 1] > 0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
}

}  // namespace

InterpolationPoints greedy_points(const Mat& modes) {
  InterpolationPoints pts;
  const Eigen::Index m = modes.cols();
  if (m == 0) {
    pts.system.resize(0, 0);
    return pts;
  }
  std::vector<char> taken(static_cast<std::size_t>(modes.rows()), 0);
  auto pick = [&](const Vec& r, Eigen::Index mode) {
    const Eigen::Index p = argmax_abs(r);
    const double scale = modes.col(mode).lpNorm<Eigen::Infinity>();
    if (!(std::abs(r[p]) > 1e-12 * scale) || taken[p])
      throw std::runtime_error("singular interpolation system at mode " + std::to_string(mode));
    taken[p] = 1;
    pts.indices.push_back(static_cast<int>(p));
  };

  pick(modes.col(0), 0);
  for (Eigen::Index l = 1; l < m; ++l) {
    Mat sys(l, l);
    Vec rhs(l);
    for (Eigen::Index i = 0; i < l; ++i) {
      sys.row(i) = modes.row(pts.indices[i]).head(l);
      rhs[i] = modes(pts.indices[i], l);
    }
    const Vec c = sys.partialPivLu().solve(rhs);
    const Vec r = modes.col(l) - modes.leftCols(l) * c;
    pick(r, l);
  }

  pts.system.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) pts.system.row(i) = modes.row(pts.indices[i]);
  pts.condition = condition_number(pts.system);
  return pts;
}

std::array<InterpolationPoints, 4> greedy_points(const CollateralBasis& basis) {
  std::array<InterpolationPoints, 4> out;
  for (int c = 0; c < kComponents; ++c) {
    try {
      out[c] = greedy_points(basis[c].modes);
    } catch (const std::runtime_error& ex) {
      throw std::runtime_error("component u" + std::to_string(c + 1) + ": " + ex.what());
    }
  }
  return out;
}

Vec interpolate(const Mat& modes, const InterpolationPoints& pts, const Vec& v) {
  if (pts.size() == 0) return Vec::Zero(modes.rows());
  Vec vp(pts.size());
  for (int i = 0; i < pts.size(); ++i) vp[i] = v[pts.indices[i]];
  return modes * pts.system.partialPivLu().solve(vp);
}

std::array<SnapshotSet, 4> collect_operator_snapshots(const Trajectory& traj, const CellConfig& cfg,
                                                      const PseudoMesh& mesh, bool stages) {
  return collect_operator_snapshots(std::vector<Trajectory>{traj}, cfg, mesh, stages);
}

std::array<SnapshotSet, 4> collect_operator_snapshots(const std::vector<Trajectory>& trajs, const CellConfig& cfg,
                                                      const PseudoMesh& mesh, bool stages) {
  Eigen::Index count = 0;
  for (const auto& tr : trajs) {
    const std::size_t steps = tr.states.empty() ? 0 : tr.states.size() - 1;
    if (tr.newton_stages.size() != steps)
      throw std::invalid_argument("trajectory lacks recorded Newton stages");
    for (const auto& st : tr.newton_stages) count += stages ? static_cast<Eigen::Index>(st.size()) : 1;
  }

  std::array<SnapshotSet, 4> out;
  for (int c = 0; c < kComponents; ++c) {
    out[c].component = static_cast<Component>(c);
    out[c].columns.resize(mesh.size(static_cast<Component>(c)), count);
    out[c].provenance.reserve(static_cast<std::size_t>(count));
  }

  Discretization disc(cfg, mesh);
  Vec g;
  Eigen::Index col = 0;
  for (const auto& tr : trajs) {
    disc.set_parameter(tr.parameter, tr.dt);
    for (std::size_t t = 0; t < tr.newton_stages.size(); ++t) {
      const Vec& prev = tr.states[t].u;
      const auto& its = tr.newton_stages[t];
      const std::size_t first = stages ? 0 : its.size() - 1;
      for (std::size_t k = first; k < its.size(); ++k, ++col) {
        disc.operator_image(its[k], prev, g);
        for (int c = 0; c < kComponents; ++c) {
          out[c].columns.col(col) = component(mesh, g, static_cast<Component>(c));
          out[c].provenance.push_back({tr.parameter, static_cast<int>(t + 1), static_cast<int>(k)});
        }
      }
    }
  }
  return out;
}

}  // namespace p2drom
