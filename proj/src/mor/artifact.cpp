// SPDX-License-Identifier: Apache-2.0
#include "p2drom/mor/artifact.hpp"

#include <Eigen/SVD>
#include <cstring>
#include <limits>
#include <fstream>
#include <map>
#include <stdexcept>

#include "p2drom/util/binary_io.hpp"

namespace p2drom {

namespace {

constexpr char kMagic[8] = {'P', '2', 'D', 'R', 'O', 'M', 'A', 'F'};
constexpr std::uint64_t kVersion = 1;

enum class SectionKind : std::uint64_t { matrix = 1, indices = 2, text = 3 };

struct Section {
  SectionKind kind = SectionKind::matrix;
  Mat matrix;
  std::vector<int> indices;
  std::string text;
};

void put_matrix(std::ostream& os, const std::string& name, const Mat& m) {
  bin::put_str(os, name);
  bin::put_u64(os, static_cast<std::uint64_t>(SectionKind::matrix));
  bin::put_u64(os, static_cast<std::uint64_t>(m.rows()));
  bin::put_u64(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) bin::put_f64(os, m(i, j));
}

void put_indices(std::ostream& os, const std::string& name, const std::vector<int>& v) {
  bin::put_str(os, name);
  bin::put_u64(os, static_cast<std::uint64_t>(SectionKind::indices));
  bin::put_u64(os, v.size());
  bin::put_u64(os, 1);
  for (int x : v) bin::put_i64(os, x);
}

void put_text(std::ostream& os, const std::string& name, const std::string& text) {
  bin::put_str(os, name);
  bin::put_u64(os, static_cast<std::uint64_t>(SectionKind::text));
  bin::put_u64(os, 0);
  bin::put_u64(os, 0);
  bin::put_str(os, text);
}

Section get_section(std::istream& is) {
  Section s;
  s.kind = static_cast<SectionKind>(bin::get_u64(is));
  const std::uint64_t rows = bin::get_u64(is);
  const std::uint64_t cols = bin::get_u64(is);
  constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 32;
  if (rows > kMaxEntries || cols > kMaxEntries || (cols && rows > kMaxEntries / cols))
    throw std::runtime_error("artifact section too large");
  switch (s.kind) {
    case SectionKind::matrix:
      s.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (Eigen::Index j = 0; j < s.matrix.cols(); ++j)
        for (Eigen::Index i = 0; i < s.matrix.rows(); ++i) s.matrix(i, j) = bin::get_f64(is);
      break;
    case SectionKind::indices:
      s.indices.resize(rows);
      for (auto& x : s.indices) x = static_cast<int>(bin::get_i64(is));
      break;
    case SectionKind::text:
      s.text = bin::get_str(is, std::size_t{1} << 24);
      break;
    default:
      throw std::runtime_error("unknown artifact section kind");
  }
  return s;
}

const char* kNames[4] = {"u1", "u2", "u3", "u4"};

void update_point_system(RomComponent& c) {
  const int m = c.points.size();
  c.points.system.resize(m, m);
  for (int i = 0; i < m; ++i) c.points.system.row(i) = c.collateral.modes.row(c.points.indices[i]);
  c.points.condition = 1.0;
  if (m > 0) {
    Eigen::JacobiSVD<Mat> svd(c.points.system);
    const Vec& s = svd.singularValues();
    c.points.condition = s[m - 1] > 0 ? s[0] / s[m - 1] : std::numeric_limits<double>::infinity();
  }
}

}  // namespace

void finalize_component(RomComponent& c) {
  c.projected = c.basis.modes.transpose() * c.collateral.modes;
  update_point_system(c);
}

std::array<int, 4> RomArtifact::basis_sizes() const {
  return {comp[0].basis.size(), comp[1].basis.size(), comp[2].basis.size(), comp[3].basis.size()};
}

std::array<int, 4> RomArtifact::collateral_sizes() const {
  return {comp[0].collateral.size(), comp[1].collateral.size(), comp[2].collateral.size(),
          comp[3].collateral.size()};
}

RomArtifact RomArtifact::truncated(std::array<int, 4> basis, std::array<int, 4> collateral) const {
  RomArtifact out = *this;
  for (int c = 0; c < kComponents; ++c) {
    RomComponent& rc = out.comp[c];
    if (basis[c] >= 0) {
      if (basis[c] > rc.basis.size()) throw std::invalid_argument("requested basis larger than the artifact");
      rc.basis.modes.conservativeResize(Eigen::NoChange, basis[c]);
      rc.basis.singular_values.conservativeResize(basis[c]);
    }
    if (collateral[c] >= 0) {
      if (collateral[c] > rc.collateral.size())
        throw std::invalid_argument("requested collateral basis larger than the artifact");
      rc.collateral.modes.conservativeResize(Eigen::NoChange, collateral[c]);
      rc.collateral.singular_values.conservativeResize(collateral[c]);
      rc.points.indices.resize(static_cast<std::size_t>(collateral[c]));
    }
    finalize_component(rc);
  }
  return out;
}

void RomArtifact::check_compatible(const CellConfig& cfg, const PseudoMesh& mesh) const {
  if (mesh.signature() != mesh_signature)
    throw std::runtime_error("reduced model was built on mesh '" + mesh_signature + "', not '" +
                             mesh.signature() + "'");
  if (cfg.hash() != config_hash)
    throw std::runtime_error("configuration differs from the one the reduced model was built with");
}

CellConfig RomArtifact::config() const { return config_from_key_values(parse_key_values(config_text)); }

void RomArtifact::save(const std::filesystem::path& file) const {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os.write(kMagic, 8);
  bin::put_u64(os, kVersion);
  bin::put_str(os, mesh_signature);
  bin::put_u64(os, config_hash);

  const std::uint64_t sections = 3 + 6 * kComponents;
  bin::put_u64(os, sections);
  put_text(os, "config", config_text);
  Mat meta(8, 1);
  meta << macro_nodes, micro_nodes, dt, eps_basis, eps_collateral, omega, newton_stages ? 1.0 : 0.0, 0.0;
  put_matrix(os, "meta", meta);
  Mat tr(3, static_cast<Eigen::Index>(train.size()));
  for (std::size_t k = 0; k < train.size(); ++k)
    tr.col(static_cast<Eigen::Index>(k)) << train[k].c_rate, train[k].d_scale, train[k].l_scale;
  put_matrix(os, "train", tr);
  for (int c = 0; c < kComponents; ++c) {
    const std::string n = kNames[c];
    put_matrix(os, "basis." + n, comp[c].basis.modes);
    put_matrix(os, "basis_sv." + n, comp[c].basis.singular_values);
    put_matrix(os, "collateral." + n, comp[c].collateral.modes);
    put_matrix(os, "collateral_sv." + n, comp[c].collateral.singular_values);
    put_indices(os, "points." + n, comp[c].points.indices);
    put_matrix(os, "projected." + n, comp[c].projected);
  }
  if (!os) throw std::runtime_error("write failed: " + file.string());
}

RomArtifact RomArtifact::load(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error(file.string() + ": not a reduced-model artifact");
  if (bin::get_u64(is) != kVersion) throw std::runtime_error(file.string() + ": unsupported artifact version");

  RomArtifact a;
  a.mesh_signature = bin::get_str(is);
  a.config_hash = bin::get_u64(is);
  const std::uint64_t n = bin::get_u64(is);
  std::map<std::string, Section> sec;
  for (std::uint64_t k = 0; k < n; ++k) {
    std::string name = bin::get_str(is);
    sec[name] = get_section(is);
  }
  auto need = [&](const std::string& name, SectionKind kind) -> const Section& {
    auto it = sec.find(name);
    if (it == sec.end() || it->second.kind != kind)
      throw std::runtime_error(file.string() + ": missing section " + name);
    return it->second;
  };

  a.config_text = need("config", SectionKind::text).text;
  const Mat& meta = need("meta", SectionKind::matrix).matrix;
  if (meta.size() < 7) throw std::runtime_error(file.string() + ": malformed meta section");
  a.macro_nodes = static_cast<int>(meta(0));
  a.micro_nodes = static_cast<int>(meta(1));
  a.dt = meta(2);
  a.eps_basis = meta(3);
  a.eps_collateral = meta(4);
  a.omega = meta(5);
  a.newton_stages = meta(6) != 0.0;
  const Mat& tr = need("train", SectionKind::matrix).matrix;
  for (Eigen::Index k = 0; k < tr.cols(); ++k) a.train.push_back({tr(0, k), tr(1, k), tr(2, k)});

  for (int c = 0; c < kComponents; ++c) {
    const std::string nm = kNames[c];
    RomComponent& rc = a.comp[c];
    rc.basis.modes = need("basis." + nm, SectionKind::matrix).matrix;
    rc.basis.singular_values = need("basis_sv." + nm, SectionKind::matrix).matrix;
    rc.collateral.modes = need("collateral." + nm, SectionKind::matrix).matrix;
    rc.collateral.singular_values = need("collateral_sv." + nm, SectionKind::matrix).matrix;
    rc.points.indices = need("points." + nm, SectionKind::indices).indices;
    rc.projected = need("projected." + nm, SectionKind::matrix).matrix;
    if (static_cast<int>(rc.points.indices.size()) != rc.collateral.size() ||
        rc.projected.rows() != rc.basis.size() || rc.projected.cols() != rc.collateral.size() ||
        rc.basis.modes.rows() != rc.collateral.modes.rows())
      throw std::runtime_error(file.string() + ": inconsistent dimensions in component " + nm);
    for (int p : rc.points.indices)
      if (p < 0 || p >= rc.collateral.modes.rows())
        throw std::runtime_error(file.string() + ": interpolation point out of range");
    update_point_system(rc);
  }
  return a;
}

}  // namespace p2drom
