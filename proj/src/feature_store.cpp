// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/feature_store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "taskzoo/error.hpp"
#include "taskzoo/json_io.hpp"

namespace taskzoo {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'M', 'X', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) return false;
  v = to_little(v);
  return true;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool has_fmx1_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  return in.gcount() == 4 && head == kMagic;
}

}  // namespace

void validate(const FeatureMatrix& f) {
  if (f.dim() == 0 || f.count() == 0)
    throw Error(Errc::MalformedFile, "'" + f.checkpoint_id + "' has an empty shape");
  for (Eigen::Index c = 0; c < f.count(); ++c)
    for (Eigen::Index r = 0; r < f.dim(); ++r)
      if (!std::isfinite(f.values(r, c)))
        throw Error(Errc::NonFiniteEntry, "'" + f.checkpoint_id + "' entry (" +
                                              std::to_string(r) + ", " + std::to_string(c) +
                                              ") is not finite");
}

namespace {

void check_zoo(const ZooManifest& manifest, std::vector<FeatureMatrix>& matrices) {
  if (matrices.empty()) throw Error(Errc::EmptyZoo, "zoo has no checkpoints");
  if (manifest.entries.size() != matrices.size())
    throw Error(Errc::InvalidArgument, "manifest and matrix list differ in length");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    const auto& id = manifest.entries[k].id;
    if (!seen.insert(id).second) throw Error(Errc::DuplicateId, "checkpoint id '" + id + "'");
    matrices[k].checkpoint_id = id;
    validate(matrices[k]);
    if (matrices[k].count() != matrices.front().count())
      throw Error(Errc::CountMismatch,
                  "'" + id + "' has " + std::to_string(matrices[k].count()) +
                      " probing samples, expected " +
                      std::to_string(matrices.front().count()));
  }
}

}  // namespace

ValidatedZoo::ValidatedZoo(ZooManifest manifest, std::vector<FeatureMatrix> matrices)
    : manifest_(std::move(manifest)), matrices_(std::move(matrices)) {
  check_zoo(manifest_, matrices_);
}

ValidatedZoo::ValidatedZoo(std::vector<FeatureMatrix> matrices) : matrices_(std::move(matrices)) {
  for (const auto& f : matrices_) manifest_.entries.push_back({f.checkpoint_id, {}, {}});
  check_zoo(manifest_, matrices_);
}

std::vector<std::string> ValidatedZoo::ids() const {
  std::vector<std::string> out;
  out.reserve(manifest_.entries.size());
  for (const auto& e : manifest_.entries) out.push_back(e.id);
  return out;
}

ValidatedZoo ValidatedZoo::restrict_columns(const std::vector<Eigen::Index>& columns) const {
  std::vector<FeatureMatrix> sub;
  sub.reserve(matrices_.size());
  for (const auto& f : matrices_) {
    FeatureMatrix g{f.checkpoint_id, Eigen::MatrixXd(f.dim(), columns.size())};
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] < 0 || columns[k] >= f.count())
        throw Error(Errc::InvalidArgument, "column index out of range");
      g.values.col(static_cast<Eigen::Index>(k)) = f.values.col(columns[k]);
    }
    sub.push_back(std::move(g));
  }
  return ValidatedZoo(manifest_, std::move(sub));
}

FeatureMatrix read_fmx1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic)
    throw Error(Errc::MalformedFile, path.string() + ": bad magic");
  std::uint32_t version = 0;
  std::uint64_t d = 0, m = 0;
  if (!get(in, version) || !get(in, d) || !get(in, m))
    throw Error(Errc::MalformedFile, path.string() + ": truncated header");
  if (version != kVersion)
    throw Error(Errc::MalformedFile, path.string() + ": unsupported version " +
                                         std::to_string(version));
  if (d == 0 || m == 0 || d > std::numeric_limits<std::uint32_t>::max() ||
      m > std::numeric_limits<std::uint32_t>::max())
    throw Error(Errc::MalformedFile, path.string() + ": bad shape");

  FeatureMatrix f{path.stem().string(), Eigen::MatrixXd(static_cast<Eigen::Index>(d),
                                                        static_cast<Eigen::Index>(m))};
  // Eigen's default storage is column-major, matching the payload order.
  double* data = f.values.data();
  const std::size_t total = static_cast<std::size_t>(d * m);
  for (std::size_t k = 0; k < total; ++k)
    if (!get(in, data[k]))
      throw Error(Errc::MalformedFile, path.string() + ": payload shorter than d*m");
  char extra = 0;
  if (in.read(&extra, 1))
    throw Error(Errc::MalformedFile, path.string() + ": trailing bytes after payload");
  validate(f);
  return f;
}

void write_fmx1(const std::filesystem::path& path, const FeatureMatrix& f) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(f.dim()));
  put(out, static_cast<std::uint64_t>(f.count()));
  const double* data = f.values.data();
  for (Eigen::Index k = 0; k < f.values.size(); ++k) put(out, data[k]);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw Error(Errc::MalformedFile, path.string() + ": missing header row");
  const std::size_t dim = split_csv_line(line).size();

  std::vector<double> flat;
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != dim)
      throw Error(Errc::MalformedFile, path.string() + ":" + std::to_string(lineno) +
                                           ": expected " + std::to_string(dim) + " columns");
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || end != c.c_str() + c.size())
        throw Error(Errc::MalformedFile,
                    path.string() + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      if (!std::isfinite(v))
        throw Error(Errc::NonFiniteEntry, path.string() + ":" + std::to_string(lineno));
      flat.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(Errc::MalformedFile, path.string() + ": no data rows");

  FeatureMatrix f{path.stem().string(),
                  Eigen::MatrixXd(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows))};
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      f.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = flat[r * dim + c];
  validate(f);
  return f;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& f) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < f.dim(); ++r) out << (r ? "," : "") << 'f' << r;
  out << '\n';
  for (Eigen::Index a = 0; a < f.count(); ++a) {
    for (Eigen::Index r = 0; r < f.dim(); ++r)
      out << (r ? "," : "") << format_double(f.values(r, a));
    out << '\n';
  }
  write_text_file(path, out.str());
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
  return has_fmx1_magic(path) ? read_fmx1(path) : read_feature_csv(path);
}

ZooManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::MalformedFile, std::string("manifest: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
    throw Error(Errc::MalformedFile, "manifest needs an \"entries\" array");

  ZooManifest m;
  if (doc.contains("probing")) {
    if (!doc["probing"].is_string())
      throw Error(Errc::MalformedFile, "manifest \"probing\" must be a string");
    m.probing_description = doc["probing"].get<std::string>();
  }
  for (const auto& e : doc["entries"]) {
    if (!e.is_object() || !e.contains("id") || !e["id"].is_string() || !e.contains("path") ||
        !e["path"].is_string())
      throw Error(Errc::MalformedFile, "manifest entry needs string \"id\" and \"path\"");
    ZooEntry entry;
    entry.id = e["id"].get<std::string>();
    entry.path = e["path"].get<std::string>();
    if (entry.path.is_relative() && !base_dir.empty()) entry.path = base_dir / entry.path;
    if (e.contains("meta")) {
      if (!e["meta"].is_object()) throw Error(Errc::MalformedFile, "\"meta\" must be an object");
      for (auto it = e["meta"].begin(); it != e["meta"].end(); ++it)
        entry.meta[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                      : it.value().dump();
    }
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::string manifest_to_json(const ZooManifest& manifest) {
  Json doc;
  doc["probing"] = manifest.probing_description;
  doc["entries"] = Json::array();
  for (const auto& e : manifest.entries) {
    Json meta = Json::object();
    for (const auto& [k, v] : e.meta) meta[k] = v;
    doc["entries"].push_back({{"id", e.id}, {"path", e.path.generic_string()}, {"meta", meta}});
  }
  return dump_canonical(doc);
}

ValidatedZoo load_zoo(const std::filesystem::path& manifest_path) {
  ZooManifest manifest =
      parse_manifest(read_text_file(manifest_path), manifest_path.parent_path());
  if (manifest.entries.empty()) throw Error(Errc::EmptyZoo, manifest_path.string());

  std::set<std::string> seen;
  for (const auto& e : manifest.entries)
    if (!seen.insert(e.id).second) throw Error(Errc::DuplicateId, "checkpoint id '" + e.id + "'");

  std::vector<FeatureMatrix> matrices;
  matrices.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    FeatureMatrix f = load_feature_matrix(e.path);
    f.checkpoint_id = e.id;
    matrices.push_back(std::move(f));
  }
  return ValidatedZoo(std::move(manifest), std::move(matrices));
}

}  // namespace taskzoo
