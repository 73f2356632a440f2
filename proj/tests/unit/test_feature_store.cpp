// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "taskzoo/error.hpp"
#include "taskzoo/feature_store.hpp"
#include "taskzoo/json_io.hpp"
#include "../test_support.hpp"

using namespace taskzoo;
using taskzoo::testing::TempDir;

namespace {

Errc error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected taskzoo::Error");
  return Errc::InvalidArgument;
}

void write_manifest(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries) {
  Json doc{{"probing", "unit test"}, {"entries", Json::array()}};
  for (const auto& [id, file] : entries) doc["entries"].push_back({{"id", id}, {"path", file}, {"meta", {{"family", "x"}}}});
  write_text_file(path, doc.dump());
}

}  // namespace

TEST_SUITE("feature_store") {

TEST_CASE("FMX1 header layout is little-endian and column-major") {
  TempDir dir;
  FeatureMatrix f{"a", Eigen::MatrixXd(2, 3)};
  f.values << 1, 2, 3,
              4, 5, 6;
  write_fmx1(dir / "a.fmx", f);

  std::ifstream in(dir / "a.fmx", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
  REQUIRE(bytes.size() == 4 + 4 + 8 + 8 + 6 * 8);
  CHECK(std::memcmp(bytes.data(), "FMX1", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 2);   // d
  CHECK(bytes[16] == 3);  // m
  double second = 0;
  std::memcpy(&second, bytes.data() + 24 + 8, 8);
  CHECK(second == 4.0);  // column 0 is (1, 4)

  const FeatureMatrix g = load_feature_matrix(dir / "a.fmx");
  CHECK(g.dim() == 2);
  CHECK(g.count() == 3);
  CHECK(g.values == f.values);
}

TEST_CASE("write then read is bit-exact for random matrices") {
  TempDir dir;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> size(1, 9);
    FeatureMatrix f{"r", taskzoo::testing::gaussian_matrix(size(rng), size(rng), rng)};
    f.values *= std::pow(10.0, trial - 10);
    write_fmx1(dir / "r.fmx", f);
    const FeatureMatrix g = read_fmx1(dir / "r.fmx");
    REQUIRE(g.values.rows() == f.values.rows());
    REQUIRE(g.values.cols() == f.values.cols());
    CHECK(std::memcmp(g.values.data(), f.values.data(), sizeof(double) * f.values.size()) == 0);

    write_feature_csv(dir / "r.csv", f);
    const FeatureMatrix h = read_feature_csv(dir / "r.csv");
    CHECK(h.values == f.values);
  }
}

TEST_CASE("CSV rows are samples and load transposed") {
  TempDir dir;
  write_text_file(dir / "c.csv", "f0,f1,f2,f3\n1,2,3,4\n5,6,7,8\n9,10,11,12\n");
  const FeatureMatrix f = load_feature_matrix(dir / "c.csv");
  CHECK(f.dim() == 4);
  CHECK(f.count() == 3);
  CHECK(f.values(0, 1) == 5.0);
  CHECK(f.values(3, 2) == 12.0);
  CHECK(f.checkpoint_id == "c");
}

TEST_CASE("malformed and non-finite files are rejected") {
  TempDir dir;
  write_text_file(dir / "nan.csv", "f0,f1\n1,nan\n");
  CHECK(error_code_of([&] { load_feature_matrix(dir / "nan.csv"); }) == Errc::NonFiniteEntry);

  FeatureMatrix f{"x", Eigen::MatrixXd::Ones(2, 2)};
  f.values(1, 1) = std::numeric_limits<double>::infinity();
  write_fmx1(dir / "inf.fmx", f);
  CHECK(error_code_of([&] { load_feature_matrix(dir / "inf.fmx"); }) == Errc::NonFiniteEntry);

  f.values(1, 1) = 1.0;
  write_fmx1(dir / "ok.fmx", f);
  std::filesystem::resize_file(dir / "ok.fmx", 24 + 3 * 8);
  CHECK(error_code_of([&] { load_feature_matrix(dir / "ok.fmx"); }) == Errc::MalformedFile);

  write_text_file(dir / "ragged.csv", "f0,f1\n1,2\n3\n");
  CHECK(error_code_of([&] { load_feature_matrix(dir / "ragged.csv"); }) == Errc::MalformedFile);
  write_text_file(dir / "header_only.csv", "f0,f1\n");
  CHECK(error_code_of([&] { load_feature_matrix(dir / "header_only.csv"); }) == Errc::MalformedFile);
  CHECK(error_code_of([&] { load_feature_matrix(dir / "missing.fmx"); }) == Errc::Io);

  std::string bad = "FMX1";
  bad += std::string("\x02\0\0\0", 4);
  write_text_file(dir / "v2.fmx", bad + std::string(16, '\0'));
  CHECK(error_code_of([&] { load_feature_matrix(dir / "v2.fmx"); }) == Errc::MalformedFile);
}

TEST_CASE("load_zoo keeps manifest order and shares the sample count") {
  TempDir dir;
  std::mt19937_64 rng(5);
  const std::vector<std::string> ids{"zeta", "alpha", "mid"};
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    FeatureMatrix f{ids[k], taskzoo::testing::gaussian_matrix(static_cast<Eigen::Index>(k) + 2, 100, rng)};
    write_fmx1(dir / (ids[k] + ".fmx"), f);
    entries.emplace_back(ids[k], ids[k] + ".fmx");
  }
  write_manifest(dir / "zoo.json", entries);
  const ValidatedZoo zoo = load_zoo(dir / "zoo.json");
  REQUIRE(zoo.size() == 3);
  CHECK(zoo.count() == 100);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    CHECK(zoo.matrices()[k].checkpoint_id == ids[k]);
    CHECK(zoo.manifest().entries[k].id == ids[k]);
    CHECK(zoo.matrices()[k].dim() == static_cast<Eigen::Index>(k) + 2);
  }
  CHECK(zoo.manifest().entries[0].meta.at("family") == "x");
  CHECK(zoo.manifest().probing_description == "unit test");
}

TEST_CASE("load_zoo error paths") {
  TempDir dir;
  std::mt19937_64 rng(6);
  write_fmx1(dir / "a.fmx", {"a", taskzoo::testing::gaussian_matrix(3, 100, rng)});
  write_fmx1(dir / "b.fmx", {"b", taskzoo::testing::gaussian_matrix(3, 99, rng)});

  write_manifest(dir / "mismatch.json", {{"a", "a.fmx"}, {"b", "b.fmx"}});
  try {
    load_zoo(dir / "mismatch.json");
    FAIL("expected CountMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CountMismatch);
    CHECK(std::string(e.what()).find("'b'") != std::string::npos);
  }

  write_manifest(dir / "dup.json", {{"a", "a.fmx"}, {"a", "a.fmx"}});
  CHECK(error_code_of([&] { load_zoo(dir / "dup.json"); }) == Errc::DuplicateId);

  write_manifest(dir / "empty.json", {});
  CHECK(error_code_of([&] { load_zoo(dir / "empty.json"); }) == Errc::EmptyZoo);

  write_text_file(dir / "junk.json", "{\"entries\": 3}");
  CHECK(error_code_of([&] { load_zoo(dir / "junk.json"); }) == Errc::MalformedFile);
}

TEST_CASE("manifest JSON round trip") {
  ZooManifest m;
  m.probing_description = "wiki";
  m.entries.push_back({"a", "feats/a.fmx", {{"k", "v"}}});
  const ZooManifest back = parse_manifest(manifest_to_json(m));
  REQUIRE(back.entries.size() == 1);
  CHECK(back.entries[0].id == "a");
  CHECK(back.entries[0].path == std::filesystem::path("feats/a.fmx"));
  CHECK(back.entries[0].meta.at("k") == "v");
  CHECK(back.probing_description == "wiki");
}

TEST_CASE("restrict_columns selects probing samples") {
  FeatureMatrix f{"a", Eigen::MatrixXd(1, 4)};
  f.values << 10, 11, 12, 13;
  const ValidatedZoo zoo({f});
  const ValidatedZoo sub = zoo.restrict_columns({1, 3});
  CHECK(sub.count() == 2);
  CHECK(sub.matrices()[0].values(0, 0) == 11);
  CHECK(sub.matrices()[0].values(0, 1) == 13);
}

}  // TEST_SUITE
