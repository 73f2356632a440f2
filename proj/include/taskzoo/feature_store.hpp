// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace taskzoo {

// Features of one checkpoint on the shared probing inputs. Column a holds the
// feature vector of probing sample a, so values is dim() x count().
struct FeatureMatrix {
  std::string checkpoint_id;
  Eigen::MatrixXd values;

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index count() const { return values.cols(); }
};

// Throws NonFiniteEntry, or MalformedFile for an empty shape. All-zero
// matrices load fine and are rejected later as ZeroGram.
void validate(const FeatureMatrix& features);

struct ZooEntry {
  std::string id;
  std::filesystem::path path;
  std::map<std::string, std::string> meta;
};

struct ZooManifest {
  std::string probing_description;
  std::vector<ZooEntry> entries;
};

// Matrices are aligned with manifest.entries and share one sample count.
// Feature dims may differ between checkpoints.
class ValidatedZoo {
 public:
  ValidatedZoo(ZooManifest manifest, std::vector<FeatureMatrix> matrices);

  // Convenience for in-memory zoos; ids are taken from the matrices.
  explicit ValidatedZoo(std::vector<FeatureMatrix> matrices);

  const ZooManifest& manifest() const { return manifest_; }
  const std::vector<FeatureMatrix>& matrices() const { return matrices_; }
  std::size_t size() const { return matrices_.size(); }
  Eigen::Index count() const { return matrices_.front().count(); }
  std::vector<std::string> ids() const;

  // Same zoo restricted to the given probing-sample columns.
  ValidatedZoo restrict_columns(const std::vector<Eigen::Index>& columns) const;

 private:
  ZooManifest manifest_;
  std::vector<FeatureMatrix> matrices_;
};

// FMX1 binary: "FMX1", u32 version=1, u64 d, u64 m, then d*m little-endian
// float64 in column-major order.
FeatureMatrix read_fmx1(const std::filesystem::path& path);
void write_fmx1(const std::filesystem::path& path, const FeatureMatrix& features);

// CSV: header row, then one probing sample per row. The loaded matrix is the
// transpose (one sample per column).
FeatureMatrix read_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& features);

// Dispatches on the magic bytes. checkpoint_id defaults to the file stem.
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

ZooManifest parse_manifest(const std::string& json_text,
                           const std::filesystem::path& base_dir = {});
std::string manifest_to_json(const ZooManifest& manifest);

// Relative entry paths resolve against the manifest's directory.
ValidatedZoo load_zoo(const std::filesystem::path& manifest_path);

}  // namespace taskzoo
