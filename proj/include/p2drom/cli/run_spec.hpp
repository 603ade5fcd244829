// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "p2drom/model/params.hpp"

namespace p2drom {

/// Values of one parameter axis: a list "a,b,c", an equidistant range
/// "lo:hi:n" (endpoints included) or a single number.
std::vector<double> parse_axis(const std::string& text);

/// Tensor grid "c_rate=0.01:4:5;d=0.5;l=0.05:0.5:4". Axes left out keep the
/// value of `base`. Points are ordered with l fastest, then d, then c_rate.
std::vector<ParameterPoint> parse_parameter_grid(const std::string& text, const ParameterPoint& base = {});

/// Axis-aligned box "c_rate=0.01:4;d=0.5" (a single value pins the axis).
struct ParameterBox {
  double lo[3] = {1.0, 1.0, 1.0};  // c_rate, d, l
  double hi[3] = {1.0, 1.0, 1.0};
};
ParameterBox parse_parameter_box(const std::string& text, const ParameterPoint& base = {});

/// `count` points drawn uniformly from the box with a 64-bit Mersenne
/// twister. Each draw uses the top 53 bits, so the sequence is identical on
/// every platform and standard library.
std::vector<ParameterPoint> sample_uniform(const ParameterBox& box, int count, std::uint64_t seed);

/// Basis size tuples "3,3,5,4;4,4,6,5".
std::vector<std::array<int, 4>> parse_size_list(const std::string& text);

enum class RunMode { simulate, offline, rom_run, cycle_study, verify, compare, experiment };

struct RunSpec {
  RunMode mode = RunMode::simulate;
  std::filesystem::path config_path;  // empty: reference cell
  CellConfig config = CellConfig::reference();
  int macro_nodes = 20;
  int micro_nodes = 10;
  double dt = 1e-2;

  ParameterPoint point{1.0, 0.5, 0.5};
  std::string train;  // grid text
  std::string test;   // box text
  int test_count = 10;
  std::uint64_t seed = 7;

  // unset: the driver's default
  std::optional<double> eps_basis;
  std::optional<double> eps_collateral;
  double omega = 0.9;
  /// Nested basis sizes of the experiment-1 error table (empty: driver default).
  std::vector<std::array<int, 4>> basis_sizes;

  std::vector<double> betas{0.1, 0.3, 0.5, 0.7, 0.9};
  int n_cycles = 50;
  int cycle_stride = 1;
  int threads = 0;

  std::filesystem::path out_dir = "out";
  std::filesystem::path artifact;

  /// Loads the configuration file (if any) and applies mesh and step size.
  CellConfig resolved_config() const;
};

const char* to_string(RunMode m);

}  // namespace p2drom
