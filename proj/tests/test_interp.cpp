// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "p2drom/mor/interpolation.hpp"

using namespace p2drom;

namespace {

Mat orthonormal(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mat a(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(m, n);
}

}  // namespace

TEST_CASE("greedy points reproduce every collateral mode") {
  const Mat u = orthonormal(200, 25, 4);
  const InterpolationPoints pts = greedy_points(u);
  REQUIRE(pts.size() == 25);
  for (Eigen::Index k = 0; k < u.cols(); ++k)
    CHECK((interpolate(u, pts, u.col(k)) - u.col(k)).lpNorm<Eigen::Infinity>() < 1e-10);
  const Vec v = u * Vec::LinSpaced(25, -1.0, 2.0);
  CHECK((interpolate(u, pts, v) - v).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(pts.condition >= 1.0);
  CHECK(pts.system.rows() == 25);
}

TEST_CASE("interpolation is a projection onto the collateral span") {
  const Mat u = orthonormal(60, 8, 7);
  const InterpolationPoints pts = greedy_points(u);
  std::mt19937_64 rng(1);
  Vec v(60);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const Vec iv = interpolate(u, pts, v);
  CHECK((interpolate(u, pts, iv) - iv).norm() < 1e-12);
  // exact at the points
  for (int p : pts.indices) CHECK(iv[p] == doctest::Approx(v[p]).epsilon(1e-12));
}

TEST_CASE("greedy points are distinct and nested") {
  const Mat u = orthonormal(100, 12, 3);
  const InterpolationPoints all = greedy_points(u);
  const InterpolationPoints head = greedy_points(u.leftCols(5));
  for (int k = 0; k < 5; ++k) CHECK(head.indices[k] == all.indices[k]);
  std::vector<int> sorted = all.indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("first index wins ties") {
  Mat u = Mat::Zero(4, 1);
  u(1, 0) = -0.5;
  u(3, 0) = 0.5;
  CHECK(greedy_points(u).indices.front() == 1);
}

TEST_CASE("linearly dependent collateral modes are rejected with the mode index") {
  Mat u = orthonormal(30, 3, 5);
  u.col(2) = u.col(0);
  try {
    greedy_points(u);
    FAIL("expected an exception");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).find("mode 2") != std::string::npos);
  }
}
