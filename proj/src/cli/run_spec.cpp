// SPDX-License-Identifier: Apache-2.0
#include "p2drom/cli/run_spec.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace p2drom {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(trim(item));
  return out;
}

int axis_index(const std::string& key) {
  if (key == "c_rate" || key == "c" || key == "C_h") return 0;
  if (key == "d" || key == "d_scale" || key == "D") return 1;
  if (key == "l" || key == "l_scale" || key == "L") return 2;
  throw ConfigError("unknown parameter axis '" + key + "' (use c_rate, d or l)");
}

// "key=value" pairs separated by ';'
std::vector<std::pair<int, std::string>> axes_of(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  for (const auto& part : split(text, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("expected axis=values in '" + part + "'");
    const int ax = axis_index(trim(part.substr(0, eq)));
    for (const auto& [a, _] : out)
      if (a == ax) throw ConfigError("axis given twice in '" + text + "'");
    out.emplace_back(ax, trim(part.substr(eq + 1)));
  }
  return out;
}

double get(const ParameterPoint& p, int ax) { return ax == 0 ? p.c_rate : ax == 1 ? p.d_scale : p.l_scale; }

}  // namespace

std::vector<double> parse_axis(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty parameter axis");
  if (t.find(':') != std::string::npos) {
    const auto f = split(t, ':');
    if (f.size() != 3) throw ConfigError("range must read lo:hi:n, got '" + t + "'");
    const double lo = to_double(f[0]), hi = to_double(f[1]);
    const double nd = to_double(f[2]);
    const int n = static_cast<int>(nd);
    if (n < 1 || n != nd) throw ConfigError("range count must be a positive integer in '" + t + "'");
    if (n == 1) {
      if (lo != hi) throw ConfigError("a one-point range needs lo == hi in '" + t + "'");
      return {lo};
    }
    if (!(hi > lo)) throw ConfigError("empty range '" + t + "'");
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1);
    return v;
  }
  std::vector<double> v;
  for (const auto& s : split(t, ',')) v.push_back(to_double(s));
  return v;
}

std::vector<ParameterPoint> parse_parameter_grid(const std::string& text, const ParameterPoint& base) {
  std::vector<double> axes[3] = {{base.c_rate}, {base.d_scale}, {base.l_scale}};
  for (const auto& [ax, values] : axes_of(text)) axes[ax] = parse_axis(values);
  std::vector<ParameterPoint> out;
  for (double c : axes[0])
    for (double d : axes[1])
      for (double l : axes[2]) {
        ParameterPoint p{c, d, l};
        p.validate();
        out.push_back(p);
      }
  return out;
}

ParameterBox parse_parameter_box(const std::string& text, const ParameterPoint& base) {
  ParameterBox box;
  for (int a = 0; a < 3; ++a) box.lo[a] = box.hi[a] = get(base, a);
  for (const auto& [ax, values] : axes_of(text)) {
    const auto f = split(values, ':');
    if (f.size() == 1) {
      box.lo[ax] = box.hi[ax] = to_double(f[0]);
    } else if (f.size() == 2) {
      box.lo[ax] = to_double(f[0]);
      box.hi[ax] = to_double(f[1]);
      if (!(box.hi[ax] >= box.lo[ax])) throw ConfigError("empty interval '" + values + "'");
    } else {
      throw ConfigError("interval must read lo:hi, got '" + values + "'");
    }
  }
  ParameterPoint{box.lo[0], box.lo[1], box.lo[2]}.validate();
  ParameterPoint{box.hi[0], box.hi[1], box.hi[2]}.validate();
  return box;
}

std::vector<ParameterPoint> sample_uniform(const ParameterBox& box, int count, std::uint64_t seed) {
  if (count < 0) throw ConfigError("negative sample count");
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<ParameterPoint> out;
  for (int k = 0; k < count; ++k) {
    double v[3];
    // every axis consumes a draw, pinned or not, so adding a range to one
    // axis does not shift the others
    for (int a = 0; a < 3; ++a) {
      const double t = unit();
      v[a] = box.lo[a] == box.hi[a] ? box.lo[a] : box.lo[a] + (box.hi[a] - box.lo[a]) * t;
    }
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

std::vector<std::array<int, 4>> parse_size_list(const std::string& text) {
  std::vector<std::array<int, 4>> out;
  for (const auto& tuple : split(text, ';')) {
    if (tuple.empty()) continue;
    const auto f = split(tuple, ',');
    if (f.size() != 4) throw ConfigError("basis size tuple needs 4 entries: '" + tuple + "'");
    std::array<int, 4> r{};
    for (int c = 0; c < 4; ++c) {
      const double v = to_double(f[c]);
      r[c] = static_cast<int>(v);
      if (r[c] < 1 || r[c] != v) throw ConfigError("basis sizes must be positive integers: '" + tuple + "'");
    }
    out.push_back(r);
  }
  if (out.empty()) throw ConfigError("empty basis size list");
  return out;
}

CellConfig RunSpec::resolved_config() const {
  CellConfig cfg = config_path.empty() ? config : load_config(config_path);
  cfg.solver.macro_nodes = macro_nodes;
  cfg.solver.micro_nodes = micro_nodes;
  cfg.solver.dt = dt;
  cfg.validate();
  return cfg;
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::simulate: return "simulate";
    case RunMode::offline: return "offline";
    case RunMode::rom_run: return "rom-run";
    case RunMode::cycle_study: return "cycle-study";
    case RunMode::verify: return "verify";
    case RunMode::compare: return "compare";
    case RunMode::experiment: return "experiment";
  }
  return "?";
}

}  // namespace p2drom
