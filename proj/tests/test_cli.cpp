// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "p2drom/cli/checks.hpp"
#include "p2drom/cli/run_spec.hpp"

using namespace p2drom;

TEST_CASE("parameter axes") {
  CHECK(parse_axis("0.5") == std::vector<double>{0.5});
  CHECK(parse_axis(" 1, 2 ,3") == std::vector<double>{1, 2, 3});
  const auto r = parse_axis("0.01:4:5");
  REQUIRE(r.size() == 5);
  CHECK(r.front() == 0.01);
  CHECK(r.back() == 4.0);
  CHECK(r[2] == doctest::Approx(2.005));
  CHECK(parse_axis("2:2:1") == std::vector<double>{2});
  CHECK_THROWS_AS(parse_axis(""), ConfigError);
  CHECK_THROWS_AS(parse_axis("1:0:3"), ConfigError);
  CHECK_THROWS_AS(parse_axis("0:1:2.5"), ConfigError);
  CHECK_THROWS_AS(parse_axis("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_axis("x"), ConfigError);
}

TEST_CASE("tensor training grids") {
  const auto g = parse_parameter_grid("d=0.05:0.5:4;l=0.1,0.2;c_rate=1");
  REQUIRE(g.size() == 8);
  CHECK(g[0] == ParameterPoint{1.0, 0.05, 0.1});
  CHECK(g[1] == ParameterPoint{1.0, 0.05, 0.2});
  CHECK(g[7] == ParameterPoint{1.0, 0.5, 0.2});
  const auto only_c = parse_parameter_grid("c_rate=0.5,2", {1.0, 0.3, 0.4});
  CHECK(only_c[1] == ParameterPoint{2.0, 0.3, 0.4});
  CHECK_THROWS_AS(parse_parameter_grid("q=1"), ConfigError);
  CHECK_THROWS_AS(parse_parameter_grid("d=1;d=2"), ConfigError);
  CHECK_THROWS_AS(parse_parameter_grid("d=0,1"), ConfigError);
  CHECK_THROWS_AS(parse_parameter_grid("d"), ConfigError);
}

TEST_CASE("seeded uniform test sets") {
  const ParameterBox box = parse_parameter_box("c_rate=0.01:4;d=0.5");
  const auto a = sample_uniform(box, 50, 7);
  const auto b = sample_uniform(box, 50, 7);
  const auto c = sample_uniform(box, 50, 8);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) {
    CHECK(p.c_rate >= 0.01);
    CHECK(p.c_rate < 4.0);
    CHECK(p.d_scale == 0.5);
    CHECK(p.l_scale == 1.0);
  }
  // a longer draw extends a shorter one
  const auto head = sample_uniform(box, 10, 7);
  CHECK(std::equal(head.begin(), head.end(), a.begin()));
  // pinning an axis does not shift the values of the others
  const auto widened = sample_uniform(parse_parameter_box("c_rate=0.01:4;d=0.1:0.5"), 50, 7);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(widened[k].c_rate == a[k].c_rate);
  CHECK_THROWS_AS(parse_parameter_box("c_rate=3:1"), ConfigError);
}

TEST_CASE("mt19937_64 stream is the standard one") {
  // 10000th output of the default-seeded engine, fixed by the standard
  std::mt19937_64 rng;
  rng.discard(9999);
  CHECK(rng() == 9981545732273789042ULL);
}

TEST_CASE("basis size lists") {
  const auto s = parse_size_list("3,3,5,4; 4,4,6,5");
  REQUIRE(s.size() == 2);
  CHECK(s[1] == std::array<int, 4>{4, 4, 6, 5});
  CHECK_THROWS_AS(parse_size_list("3,3,5"), ConfigError);
  CHECK_THROWS_AS(parse_size_list("3,0,5,4"), ConfigError);
  CHECK_THROWS_AS(parse_size_list(""), ConfigError);
}

TEST_CASE("run spec applies mesh and step to the configuration") {
  RunSpec s;
  s.macro_nodes = 12;
  s.micro_nodes = 6;
  s.dt = 5e-3;
  const CellConfig cfg = s.resolved_config();
  CHECK(cfg.solver.macro_nodes == 12);
  CHECK(cfg.solver.dt == 5e-3);
  s.config_path = "/nonexistent/cell.cfg";
  CHECK_THROWS(s.resolved_config());
}

TEST_CASE("verification checks catch a corrupted Jacobian") {
  RunSpec spec;
  spec.macro_nodes = 6;
  spec.micro_nodes = 4;
  spec.out_dir = std::filesystem::temp_directory_path() / "p2drom_cli_test";
  const CheckContext ctx = CheckContext::from(spec);
  const CheckResult good = check_jacobian_fd(ctx);
  CHECK(good.pass);
  const CheckResult bad = check_jacobian_fd(ctx, 0.1);
  CHECK_FALSE(bad.pass);
  CHECK(bad.measured > good.measured);

  std::filesystem::create_directories(spec.out_dir);
  const auto file = spec.out_dir / "checks.csv";
  write_check_csv(file, {good, bad});
  std::ifstream is(file);
  std::string header, l1, l2;
  std::getline(is, header);
  std::getline(is, l1);
  std::getline(is, l2);
  CHECK(header == "name,pass,measured,tolerance,detail");
  CHECK(l1.rfind("jacobian_fd,1,", 0) == 0);
  CHECK(l2.rfind("jacobian_fd,0,", 0) == 0);
  std::filesystem::remove_all(spec.out_dir);
}

TEST_CASE("verify suite passes on a small mesh") {
  RunSpec spec;
  spec.macro_nodes = 6;
  spec.micro_nodes = 4;
  spec.out_dir = std::filesystem::temp_directory_path() / "p2drom_cli_test2";
  for (const auto& c : verify_suite(CheckContext::from(spec))) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
}
