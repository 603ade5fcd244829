// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/SVD>
#include <random>

#include "p2drom/mor/pod.hpp"

using namespace p2drom;

namespace {

Mat random_matrix(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  Mat a(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  return a;
}

Mat graded(Eigen::Index m, Eigen::Index n, double decades, std::mt19937_64& rng) {
  const Eigen::Index k = std::min(m, n);
  Eigen::HouseholderQR<Mat> q1(random_matrix(m, k, rng)), q2(random_matrix(n, k, rng));
  const Mat Q1 = q1.householderQ() * Mat::Identity(m, k);
  const Mat Q2 = q2.householderQ() * Mat::Identity(n, k);
  Vec s(k);
  for (Eigen::Index i = 0; i < k; ++i) s[i] = std::pow(10.0, -decades * static_cast<double>(i) / k);
  return Q1 * s.asDiagonal() * Q2.transpose();
}

std::vector<Mat> split_columns(const Mat& s, int parts) {
  std::vector<Mat> out;
  const Eigen::Index step = (s.cols() + parts - 1) / parts;
  for (Eigen::Index j = 0; j < s.cols(); j += step) out.push_back(s.middleCols(j, std::min(step, s.cols() - j)));
  return out;
}

}  // namespace

TEST_CASE("POD truncation error equals the dense SVD tail") {
  std::mt19937_64 rng(11);
  for (auto [m, n] : {std::pair<int, int>{500, 100}, {120, 40}, {30, 90}}) {
    const Mat s = graded(m, n, 10.0, rng);
    const Vec sv = Eigen::JacobiSVD<Mat>(s).singularValues();
    for (double eps : {1e-1, 1e-3, 1e-7}) {
      const BasisMatrix b = pod(s, eps);
      const double tail = std::sqrt(sv.tail(sv.size() - b.size()).squaredNorm());
      CHECK(std::abs(projection_error(b.modes, s) - tail) / s.norm() < 1e-9);
      CHECK(tail <= eps * s.norm() * (1 + 1e-12));
      // one mode fewer would violate the bound
      if (b.size() > 0) CHECK(std::sqrt(sv.tail(sv.size() - b.size() + 1).squaredNorm()) > eps * s.norm());
      CHECK((b.modes.transpose() * b.modes - Mat::Identity(b.size(), b.size())).norm() < 1e-12);
      CHECK(b.truncated_energy == doctest::Approx(tail).epsilon(1e-9));
    }
  }
}

TEST_CASE("POD sizes are monotone in the tolerance and capped by max_modes") {
  std::mt19937_64 rng(5);
  const Mat s = graded(80, 60, 8.0, rng);
  int last = 0;
  for (double eps : {1e-1, 1e-2, 1e-4, 1e-6, 0.0}) {
    const int r = pod(s, eps).size();
    CHECK(r >= last);
    last = r;
  }
  CHECK(last == 60);
  CHECK(pod(s, 0.0, 7).size() == 7);
  CHECK(pod(s, 1.001).size() == 0);
}

TEST_CASE("POD modes are nested and sign-normalised") {
  std::mt19937_64 rng(9);
  const Mat s = graded(50, 30, 6.0, rng);
  const BasisMatrix big = pod(s, 1e-6), small = pod(s, 1e-2);
  REQUIRE(small.size() < big.size());
  CHECK((big.modes.leftCols(small.size()) - small.modes).norm() < 1e-10);
  const BasisMatrix flipped = pod(-s, 1e-6);
  CHECK((flipped.modes - big.modes).norm() < 1e-10);
}

TEST_CASE("rank-deficient and degenerate snapshot sets") {
  Mat s = Mat::Zero(10, 4);
  s.col(0).setOnes();
  s.col(2).setConstant(2.0);
  CHECK(pod(s, 0.0).size() == 1);
  CHECK(pod(Mat::Zero(6, 3), 0.0).size() == 0);
  CHECK_THROWS_AS(pod(Mat(0, 3), 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(pod(s, -1.0), std::invalid_argument);
}

TEST_CASE("incremental HAPOD meets the global bound and keeps at least the POD modes") {
  std::mt19937_64 rng(21);
  for (int parts : {1, 3, 8}) {
    const Mat s = graded(200, 96, 9.0, rng);
    const auto chunks = split_columns(s, parts);
    for (double eps : {1e-2, 1e-4, 1e-6})
      for (double omega : {0.5, 0.9}) {
        const BasisMatrix h = hapod_incremental(chunks, eps, omega);
        CHECK(projection_error(h.modes, s) <= eps * s.norm() * (1 + 1e-12));
        CHECK(h.size() >= pod(s, eps).size());
        CHECK(h.truncated_energy <= eps * s.norm() * (1 + 1e-12));
      }
  }
}

TEST_CASE("HAPOD with a single chunk is POD") {
  std::mt19937_64 rng(2);
  const Mat s = graded(40, 25, 6.0, rng);
  const BasisMatrix h = hapod_incremental({s}, 1e-3, 0.9);
  const BasisMatrix p = pod(s, 1e-3);
  REQUIRE(h.size() == p.size());
  CHECK((h.modes - p.modes).norm() < 1e-10);
}

TEST_CASE("HAPOD argument checks") {
  CHECK_THROWS_AS(hapod_incremental({}, 1e-3, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(hapod_incremental({Mat::Ones(3, 2), Mat::Ones(4, 2)}, 1e-3, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(hapod_incremental({Mat::Ones(3, 2)}, 1e-3, 1.0), std::invalid_argument);
}

TEST_CASE("snapshot sets keep provenance") {
  SnapshotSet set;
  set.component = Component::u3;
  set.append(Vec::Ones(4), {{1.0, 0.5, 0.5}, 3, 1});
  set.append(Vec::Zero(4), {{2.0, 0.5, 0.5}, 4, -1});
  CHECK(set.size() == 2);
  CHECK(set.provenance[1].time_index == 4);
  CHECK(set.provenance[0].newton_stage == 1);
  CHECK_THROWS(set.append(Vec::Ones(5), {}));
}
