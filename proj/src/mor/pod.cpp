// SPDX-License-Identifier: Apache-2.0
#include "p2drom/mor/pod.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2drom {

void SnapshotSet::append(const Eigen::Ref<const Vec>& col, const SnapshotProvenance& p) {
  if (columns.cols() > 0 && col.size() != columns.rows())
    throw std::invalid_argument("snapshot dimension mismatch");
  columns.conservativeResize(col.size(), columns.cols() + 1);
  columns.col(columns.cols() - 1) = col;
  provenance.push_back(p);
}

namespace {

// Makes the first clearly nonzero entry of every column positive.
void fix_signs(Mat& modes) {
  for (Eigen::Index j = 0; j < modes.cols(); ++j) {
    const double big = modes.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < modes.rows(); ++i) {
      if (std::abs(modes(i, j)) > 1e-8 * big) {
        if (modes(i, j) < 0) modes.col(j) *= -1.0;
        break;
      }
    }
  }
}

BasisMatrix truncate(const Mat& snapshots, double tail_bound, int max_modes) {
  if (snapshots.cols() == 0 || snapshots.rows() == 0) throw std::invalid_argument("empty snapshot set");
  Eigen::BDCSVD<Mat> svd(snapshots, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  const Eigen::Index k = s.size();

  // numerical rank: drop singular values at round-off level
  const double floor = s.size() ? s[0] * std::max(snapshots.rows(), snapshots.cols()) *
                                      std::numeric_limits<double>::epsilon()
                                : 0.0;
  Eigen::Index rank = 0;
  while (rank < k && s[rank] > floor) ++rank;

  // tail[r] = sum_{j >= r} s_j^2, accumulated from the small end
  std::vector<double> tail(k + 1, 0.0);
  for (Eigen::Index j = k - 1; j >= 0; --j) tail[j] = tail[j + 1] + s[j] * s[j];

  Eigen::Index r = 0;
  const double bound2 = tail_bound * tail_bound;
  while (r < rank && tail[r] > bound2) ++r;
  if (max_modes >= 0) r = std::min<Eigen::Index>(r, max_modes);

  BasisMatrix b;
  b.modes = svd.matrixU().leftCols(r);
  b.singular_values = s.head(r);
  b.truncated_energy = std::sqrt(tail[r]);
  fix_signs(b.modes);
  return b;
}

}  // namespace

BasisMatrix pod(const Mat& snapshots, double eps, int max_modes) {
  if (eps < 0) throw std::invalid_argument("POD tolerance must be nonnegative");
  return truncate(snapshots, eps * snapshots.norm(), max_modes);
}

BasisMatrix pod(const SnapshotSet& set, double eps, int max_modes) { return pod(set.columns, eps, max_modes); }

BasisMatrix pod_absolute(const Mat& snapshots, double tol, int max_modes) {
  if (tol < 0) throw std::invalid_argument("POD tolerance must be nonnegative");
  return truncate(snapshots, tol, max_modes);
}

BasisMatrix hapod_incremental(const std::vector<Mat>& chunks, double eps, double omega, int max_modes) {
  if (chunks.empty()) throw std::invalid_argument("HAPOD needs at least one chunk");
  if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("HAPOD omega must lie in (0,1)");
  if (eps < 0) throw std::invalid_argument("HAPOD tolerance must be nonnegative");

  const Eigen::Index n = chunks.front().rows();
  double total = 0.0;      // ||S||_F^2 of everything seen so far
  double discarded = 0.0;  // sum of squared local truncation errors
  BasisMatrix acc;
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const Mat& s = chunks[c];
    if (s.rows() != n) throw std::invalid_argument("HAPOD chunks differ in row count");
    total += s.squaredNorm();

    Mat buffer(n, acc.size() + s.cols());
    buffer << acc.modes * acc.singular_values.asDiagonal(), s;
    if (buffer.cols() == 0) continue;

    const bool root = c + 1 == chunks.size();
    double tol;
    if (root) {
      // whatever is left of the global budget eps^2 ||S||^2
      tol = std::sqrt(std::max(0.0, eps * eps * total - discarded));
    } else {
      tol = std::sqrt(1.0 - omega * omega) * eps * s.norm();
    }
    acc = truncate(buffer, tol, root ? max_modes : -1);
    discarded += acc.truncated_energy * acc.truncated_energy;
  }
  acc.truncated_energy = std::sqrt(discarded);
  return acc;
}

double projection_error(const Mat& modes, const Mat& snapshots) {
  if (modes.cols() == 0) return snapshots.norm();
  return (snapshots - modes * (modes.transpose() * snapshots)).norm();
}

Mat component_snapshots(const Trajectory& traj, const PseudoMesh& mesh, Component c) {
  Mat s(mesh.size(c), static_cast<Eigen::Index>(traj.states.size()));
  for (std::size_t t = 0; t < traj.states.size(); ++t)
    s.col(static_cast<Eigen::Index>(t)) = component(mesh, traj.states[t].u, c);
  return s;
}

std::array<BasisMatrix, 4> componentwise_basis(const std::vector<Trajectory>& trajectories, const PseudoMesh& mesh,
                                               double eps, double omega, std::array<int, 4> max_modes) {
  if (trajectories.empty()) throw std::invalid_argument("no trajectories given");
  std::array<BasisMatrix, 4> out;
  for (int c = 0; c < kComponents; ++c) {
    std::vector<Mat> chunks;
    for (const auto& tr : trajectories) {
      if (tr.states.empty()) continue;
      if (tr.states.front().u.size() != mesh.dofs())
        throw std::invalid_argument("trajectory does not live on the given mesh");
      chunks.push_back(component_snapshots(tr, mesh, static_cast<Component>(c)));
    }
    out[c] = hapod_incremental(chunks, eps, omega, max_modes[c]);
  }
  return out;
}

}  // namespace p2drom
