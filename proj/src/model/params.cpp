// SPDX-License-Identifier: Apache-2.0
#include "p2drom/model/params.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace p2drom {

const char* to_string(Electrode e) { return e == Electrode::anode ? "anode" : "cathode"; }

const char* to_string(Region r) {
  switch (r) {
    case Region::anode: return "anode";
    case Region::separator: return "separator";
    case Region::cathode: return "cathode";
  }
  return "?";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

struct Field {
  std::string key;
  std::function<double&(CellConfig&)> ref;
};

void add_electrode(std::vector<Field>& f, const std::string& p, Electrode e) {
  auto el = [e](CellConfig& c) -> ElectrodeParams& { return c.electrode(e); };
  f.push_back({p + ".lattice_density", [el](CellConfig& c) -> double& { return el(c).lattice_density; }});
  f.push_back({p + ".y_initial", [el](CellConfig& c) -> double& { return el(c).y_initial; }});
  f.push_back({p + ".enthalpy_gamma", [el](CellConfig& c) -> double& { return el(c).enthalpy_gamma; }});
  f.push_back({p + ".solid_conductivity", [el](CellConfig& c) -> double& { return el(c).solid_conductivity; }});
  f.push_back({p + ".diff_ref", [el](CellConfig& c) -> double& { return el(c).diff_ref; }});
  f.push_back({p + ".exchange_rate", [el](CellConfig& c) -> double& { return el(c).exchange_rate; }});
  f.push_back({p + ".half_cell_energy", [el](CellConfig& c) -> double& { return el(c).half_cell_energy; }});
  f.push_back({p + ".particle_radius", [el](CellConfig& c) -> double& { return el(c).particle_radius; }});
  f.push_back({p + ".unit_cell_width", [el](CellConfig& c) -> double& { return el(c).unit_cell_width; }});
}

void add_region(std::vector<Field>& f, const std::string& p, Region r) {
  auto g = [r](CellConfig& c) -> PorousGeometry& { return c.region(r); };
  f.push_back({p + ".psi_E", [g](CellConfig& c) -> double& { return g(c).psi_E; }});
  f.push_back({p + ".psi_S", [g](CellConfig& c) -> double& { return g(c).psi_S; }});
  f.push_back({p + ".pi_E", [g](CellConfig& c) -> double& { return g(c).pi_E; }});
  f.push_back({p + ".pi_S", [g](CellConfig& c) -> double& { return g(c).pi_S; }});
  f.push_back({p + ".theta", [g](CellConfig& c) -> double& { return g(c).theta; }});
  f.push_back({p + ".width", [g](CellConfig& c) -> double& { return g(c).width; }});
}

// Integer solver settings are stored as doubles in the table and rounded.
struct IntField {
  std::string key;
  int SolverSettings::*member;
};

const std::vector<IntField>& int_fields() {
  static const std::vector<IntField> fields = {
      {"solver.macro_nodes", &SolverSettings::macro_nodes},
      {"solver.micro_nodes", &SolverSettings::micro_nodes},
      {"solver.newton_max_iter", &SolverSettings::newton_max_iter},
  };
  return fields;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"electrolyte.n_solvent_ref", [](CellConfig& c) -> double& { return c.electrolyte.n_solvent_ref; }});
    f.push_back({"electrolyte.n_salt_ref", [](CellConfig& c) -> double& { return c.electrolyte.n_salt_ref; }});
    f.push_back({"electrolyte.solvation_number", [](CellConfig& c) -> double& { return c.electrolyte.solvation_number; }});
    f.push_back({"electrolyte.transference", [](CellConfig& c) -> double& { return c.electrolyte.transference; }});
    f.push_back({"electrolyte.diff_coeff", [](CellConfig& c) -> double& { return c.electrolyte.diff_coeff; }});
    f.push_back({"electrolyte.molar_conductivity", [](CellConfig& c) -> double& { return c.electrolyte.molar_conductivity; }});
    add_electrode(f, "anode", Electrode::anode);
    add_electrode(f, "cathode", Electrode::cathode);
    add_region(f, "geometry.anode", Region::anode);
    add_region(f, "geometry.separator", Region::separator);
    add_region(f, "geometry.cathode", Region::cathode);
    f.push_back({"bv_symmetry", [](CellConfig& c) -> double& { return c.bv_symmetry; }});
    f.push_back({"e_min", [](CellConfig& c) -> double& { return c.e_min; }});
    f.push_back({"temperature", [](CellConfig& c) -> double& { return c.temperature; }});
    f.push_back({"n_electrolyte_ref", [](CellConfig& c) -> double& { return c.n_electrolyte_ref; }});
    f.push_back({"solver.dt", [](CellConfig& c) -> double& { return c.solver.dt; }});
    f.push_back({"solver.newton_rtol", [](CellConfig& c) -> double& { return c.solver.newton_rtol; }});
    f.push_back({"solver.newton_atol", [](CellConfig& c) -> double& { return c.solver.newton_atol; }});
    return f;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ElectrolyteParams::validate() const {
  require(n_solvent_ref > 0 && n_salt_ref > 0, "electrolyte concentrations must be positive");
  require(solvation_number >= 1.0, "electrolyte.solvation_number must be >= 1");
  require(transference > 0.0 && transference < 1.0, "electrolyte.transference must lie in (0,1)");
  require(diff_coeff > 0.0, "electrolyte.diff_coeff must be positive");
  require(molar_conductivity > 0.0, "electrolyte.molar_conductivity must be positive");
}

void ElectrodeParams::validate(const char* name) const {
  const std::string p(name);
  require(enthalpy_gamma > -2.5, p + ".enthalpy_gamma must exceed -2.5 (phase separation)");
  require(y_initial > 0.0 && y_initial < 1.0, p + ".y_initial must lie in (0,1)");
  require(diff_ref > 0.0, p + ".diff_ref must be positive");
  require(exchange_rate > 0.0, p + ".exchange_rate must be positive");
  require(lattice_density > 0.0, p + ".lattice_density must be positive");
  require(solid_conductivity > 0.0, p + ".solid_conductivity must be positive");
  require(particle_radius > 0.0 && particle_radius < 0.5, p + ".particle_radius must lie in (0,0.5)");
}

CellConfig CellConfig::reference() {
  CellConfig c;
  c.anode.y_initial = 0.99;
  c.anode.half_cell_energy = 0.2;
  c.cathode.y_initial = 0.01;
  c.cathode.half_cell_energy = 3.95;
  for (Region r : {Region::anode, Region::cathode}) {
    auto& g = c.region(r);
    g.psi_S = 0.27286022;
    g.pi_S = 0.09819225;
    g.theta = 1.96328590;
  }
  return c;
}

double CellConfig::total_width() const {
  return geometry[0].width + geometry[1].width + geometry[2].width;
}

double CellConfig::active_fraction(Electrode e) const {
  // volume / surface of a sphere of radius r is r/3
  return region(region_of(e)).theta * electrode(e).particle_radius / 3.0;
}

double CellConfig::eta_w_cathode() const {
  return active_fraction(Electrode::cathode) * width_fraction(Region::cathode);
}

void CellConfig::validate() const {
  electrolyte.validate();
  anode.validate("anode");
  cathode.validate("cathode");
  require(bv_symmetry >= 0.0 && bv_symmetry <= 1.0, "bv_symmetry must lie in [0,1]");
  require(n_electrolyte_ref > 0.0, "n_electrolyte_ref must be positive");
  require(temperature > 0.0, "temperature must be positive");
  for (Region r : {Region::anode, Region::separator, Region::cathode}) {
    const auto& g = region(r);
    const std::string p = std::string("geometry.") + to_string(r);
    require(g.psi_E > 0.0 && g.psi_E < 1.0, p + ".psi_E must lie in (0,1)");
    require(g.pi_E > 0.0 && g.pi_E <= 1.0, p + ".pi_E must lie in (0,1]");
    require(g.theta >= 0.0, p + ".theta must be nonnegative");
    require(g.width > 0.0, p + ".width must be positive");
    if (r != Region::separator) {
      require(g.psi_S > 0.0 && g.pi_S > 0.0, p + " needs a solid phase (psi_S, pi_S > 0)");
      require(g.theta > 0.0, p + ".theta must be positive in an electrode");
    } else {
      require(g.theta == 0.0, "geometry.separator.theta must be zero");
    }
  }
  const double n_es = electrolyte.n_solvent_ref;
  const double n_ec = electrolyte.n_salt_ref;
  const double y0 = n_ec / (n_es - 2.0 * electrolyte.solvation_number * n_ec);
  require(y0 > 0.0 && y0 < 0.5, "initial electrolyte mole fraction must lie in (0,0.5)");
  require(solver.macro_nodes >= 2 && solver.micro_nodes >= 2, "mesh needs at least 2 nodes per direction");
  require(solver.dt > 0.0, "solver.dt must be positive");
  require(solver.newton_rtol > 0.0 && solver.newton_max_iter >= 1, "invalid Newton settings");
}

std::uint64_t CellConfig::hash() const {
  // FNV-1a over the canonical text form
  const std::string text = to_key_values(*this);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void ParameterPoint::validate() const {
  if (!(c_rate >= 0.0)) throw ConfigError("c_rate must be nonnegative");
  if (!(d_scale > 0.0)) throw ConfigError("d_scale must be positive");
  if (!(l_scale > 0.0)) throw ConfigError("l_scale must be positive");
}

KeyValueMap parse_key_values(const std::string& text) {
  KeyValueMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

CellConfig config_from_key_values(const KeyValueMap& kv, CellConfig base) {
  for (const auto& [key, value] : kv) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': not a number: " + value);
    }
    if (used != value.size()) throw ConfigError("key '" + key + "': trailing characters in " + value);

    bool found = false;
    for (const auto& f : fields()) {
      if (f.key == key) {
        f.ref(base) = v;
        found = true;
        break;
      }
    }
    for (const auto& f : int_fields()) {
      if (f.key == key) {
        if (v != std::floor(v)) throw ConfigError("key '" + key + "' expects an integer");
        base.solver.*f.member = static_cast<int>(v);
        found = true;
      }
    }
    if (!found) throw ConfigError("unknown configuration key '" + key + "'");
  }
  base.validate();
  return base;
}

CellConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_key_values(parse_key_values(buf.str()));
}

std::string to_key_values(const CellConfig& config) {
  CellConfig c = config;
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + format_double(f.ref(c)) + "\n";
  for (const auto& f : int_fields()) out += f.key + " = " + std::to_string(c.solver.*f.member) + "\n";
  return out;
}

}  // namespace p2drom
