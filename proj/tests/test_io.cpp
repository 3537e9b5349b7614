// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "smokefilter/errors.hpp"
#include "smokefilter/io.hpp"

using namespace smokefilter;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("smokefilter_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Values representable in float32 so that the binary round trip is exact.
PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-100.0f, 100.0f);
  std::uniform_real_distribution<float> in(0.0f, 255.0f);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({u(rng), u(rng), u(rng), in(rng)});
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kHeader =
    "VERSION 0.7\nFIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nCOUNT 1 1 1 1\n"
    "WIDTH 2\nHEIGHT 1\nPOINTS 2\nDATA ascii\n";

}  // namespace

TEST(Pcd, GoldenAscii) {
  const PointCloud c = read_cloud(SMOKEFILTER_TEST_DATA "/three_points.pcd");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (Point{1.5, -2.25, 0.125, 10.0}));
  EXPECT_EQ(c[1], (Point{-3.0, 4.0, 5.5, 0.5}));
  EXPECT_EQ(c[2], (Point{0.0, 0.0, -1.0, 255.0}));
}

TEST(Pcd, BinaryRoundTripIsBitExact) {
  TempDir dir;
  const PointCloud c = random_cloud(10000, 1);
  write_cloud(c, dir / "a.pcd", CloudFormat::pcd_binary);
  const PointCloud back = read_cloud(dir / "a.pcd");
  EXPECT_EQ(back.points, c.points);
  write_cloud(back, dir / "b.pcd", CloudFormat::pcd_binary);
  EXPECT_EQ(slurp(dir / "a.pcd"), slurp(dir / "b.pcd"));
  // payload bytes are little-endian float32 x y z intensity
  const std::string bytes = slurp(dir / "a.pcd");
  const std::string payload = bytes.substr(bytes.find("DATA binary\n") + 12);
  ASSERT_EQ(payload.size(), 16u * c.size());
  const auto* u = reinterpret_cast<const unsigned char*>(payload.data());
  const std::uint32_t bits = u[4] | (u[5] << 8) | (u[6] << 16) | (static_cast<std::uint32_t>(u[7]) << 24);
  EXPECT_EQ(std::bit_cast<float>(bits), static_cast<float>(c[0].y));
}

TEST(Pcd, AsciiRoundTrip) {
  TempDir dir;
  const PointCloud c = random_cloud(1000, 2);
  write_cloud(c, dir / "a.pcd", CloudFormat::pcd_ascii);
  EXPECT_NE(slurp(dir / "a.pcd").find("DATA ascii"), std::string::npos);
  EXPECT_EQ(read_cloud(dir / "a.pcd").points, c.points);
}

TEST(Pcd, EmptyAndNegative) {
  TempDir dir;
  for (CloudFormat f : {CloudFormat::pcd_ascii, CloudFormat::pcd_binary, CloudFormat::csv}) {
    const fs::path p = dir / ("empty." + std::string(f == CloudFormat::csv ? "csv" : "pcd"));
    write_cloud(PointCloud{}, p, f);
    EXPECT_TRUE(read_cloud(p).empty());
  }
  const std::string text = slurp(dir / "empty.pcd");
  EXPECT_NE(text.find("POINTS 0"), std::string::npos);
  PointCloud neg;
  neg.points = {{-1.5, -0.0, -1e-3, 2.0}};
  write_cloud(neg, dir / "neg.pcd");
  const PointCloud back = read_cloud(dir / "neg.pcd");
  EXPECT_EQ(back[0].x, -1.5);
  EXPECT_TRUE(std::signbit(back[0].y));
  EXPECT_LT(back[0].z, 0.0);
}

TEST(Pcd, MissingIntensity) {
  std::istringstream in(
      "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\nWIDTH 1\nHEIGHT 1\nPOINTS 1\nDATA ascii\n1 2 3\n");
  EXPECT_THROW(read_pcd(in), DataError);
}

TEST(Pcd, CountMismatch) {
  std::istringstream few(std::string(kHeader) + "1 2 3 4\n");
  EXPECT_THROW(read_pcd(few), DataError);
  std::istringstream many(std::string(kHeader) + "1 2 3 4\n1 2 3 4\n1 2 3 4\n");
  EXPECT_THROW(read_pcd(many), DataError);
  std::istringstream bad_width(
      "FIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nWIDTH 3\nHEIGHT 1\nPOINTS 2\nDATA ascii\n1 2 3 4\n1 2 3 4\n");
  EXPECT_THROW(read_pcd(bad_width), DataError);
  std::istringstream short_binary(
      "FIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nWIDTH 2\nHEIGHT 1\nPOINTS 2\nDATA binary\n0123456789");
  EXPECT_THROW(read_pcd(short_binary), DataError);
}

TEST(Pcd, NanReportsRow) {
  std::istringstream in(std::string(kHeader) + "1 2 3 4\n1 nan 3 4\n");
  try {
    read_pcd(in, "frame.pcd");
    FAIL() << "NaN accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("frame.pcd"), std::string::npos);
  }
}

TEST(Pcd, MalformedHeader) {
  std::istringstream no_data("FIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nPOINTS 0\n");
  EXPECT_THROW(read_pcd(no_data), DataError);
  std::istringstream doubles(
      "FIELDS x y z intensity\nSIZE 8 8 8 8\nTYPE F F F F\nPOINTS 0\nDATA ascii\n");
  EXPECT_THROW(read_pcd(doubles), DataError);
  std::istringstream compressed(
      "FIELDS x y z intensity\nSIZE 4 4 4 4\nTYPE F F F F\nPOINTS 0\nDATA binary_compressed\n");
  EXPECT_THROW(read_pcd(compressed), DataError);
}

TEST(Pcd, MissingFileHasPath) {
  try {
    read_cloud("/nonexistent/dir/cloud.pcd");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/cloud.pcd"), std::string::npos);
  }
  EXPECT_THROW(write_cloud(PointCloud{}, "/nonexistent/dir/out.pcd"), DataError);
}

TEST(Csv, MatchesNaiveParser) {
  TempDir dir;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::ostringstream text;
  text << "x,y,z,intensity\n";
  text.precision(12);
  for (int i = 0; i < 1000; ++i) text << u(rng) << ',' << u(rng) << ',' << u(rng) << ',' << std::abs(u(rng)) << '\n';
  spit(dir / "c.csv", text.str());
  const PointCloud c = read_cloud(dir / "c.csv");
  ASSERT_EQ(c.size(), 1000u);

  // naive oracle: split on commas, stod each field
  std::istringstream lines(text.str());
  std::string line;
  std::getline(lines, line);
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    std::vector<double> v;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
      v.push_back(std::stod(line.substr(start, pos - start)));
    }
    v.push_back(std::stod(line.substr(start)));
    EXPECT_EQ(c[row], (Point{v[0], v[1], v[2], v[3]}));
    ++row;
  }
}

TEST(Csv, RoundTripAndColumnOrder) {
  TempDir dir;
  PointCloud c;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) c.points.push_back({u(rng), u(rng), u(rng), std::abs(u(rng))});
  write_cloud(c, dir / "a.csv");
  EXPECT_EQ(read_cloud(dir / "a.csv").points, c.points);

  std::istringstream shuffled("intensity, z ,y,x\n4,3,2,1\n");
  EXPECT_EQ(read_csv(shuffled)[0], (Point{1, 2, 3, 4}));
  std::istringstream missing("x,y,z\n1,2,3\n");
  EXPECT_THROW(read_csv(missing), DataError);
  std::istringstream ragged("x,y,z,intensity\n1,2,3\n");
  EXPECT_THROW(read_csv(ragged), DataError);
}

TEST(Sidecars, LabelsAndIndices) {
  TempDir dir;
  const std::vector<Label> labels{Label::environment, Label::aerosol, Label::environment};
  write_labels(labels, dir / "l.csv");
  EXPECT_EQ(slurp(dir / "l.csv"), "index,label\n0,environment\n1,aerosol\n2,environment\n");
  EXPECT_EQ(read_labels(dir / "l.csv"), labels);
  spit(dir / "dup.csv", "index,label\n0,aerosol\n0,aerosol\n");
  EXPECT_THROW(read_labels(dir / "dup.csv"), DataError);
  spit(dir / "bad.csv", "index,label\n0,smoke\n");
  EXPECT_THROW(read_labels(dir / "bad.csv"), DataError);

  const std::vector<std::size_t> idx{3, 7, 42};
  write_indices(idx, dir / "i.csv");
  EXPECT_EQ(read_indices(dir / "i.csv"), idx);
}

TEST(Config, EmptyGivesInitialValues) {
  const PipelineConfig cfg = config_from_json(json::object());
  EXPECT_EQ(cfg.r_max, 30.0);
  EXPECT_EQ(cfg.r_min, 5.0);
  EXPECT_EQ(cfg.intensity.initial_threshold, 2.0);
  EXPECT_EQ(cfg.sg_close.r_d, 4.0);
  EXPECT_EQ(cfg.sg_long.r_d, 20.0);
  EXPECT_EQ(cfg.doscor.k_min, 6u);
  EXPECT_EQ(cfg.doscor.r_th, 0.45);
  EXPECT_EQ(cfg.doscor.c_th, 0.4);
  EXPECT_EQ(cfg.ror2d.r_nn, 0.15);
}

TEST(Config, TableKeys) {
  const PipelineConfig cfg = config_from_json(json::parse(R"({
    "r_max": 40, "r_min": 3, "I_th": 1.5, "r_d": [2.5, 25], "K_nn": 3,
    "r_th": 0.3, "c_th": 0.2, "r_nn": 0.12, "p": 0.1,
    "doscor": {"query_radius": 0.2}, "stages": {"close": {"sg": false}}
  })"));
  EXPECT_EQ(cfg.r_max, 40.0);
  EXPECT_EQ(cfg.r_min, 3.0);
  EXPECT_EQ(cfg.intensity.initial_threshold, 1.5);
  EXPECT_EQ(cfg.sg_close.r_d, 2.5);
  EXPECT_EQ(cfg.sg_long.r_d, 25.0);
  EXPECT_EQ(cfg.doscor.k_min, 3u);
  EXPECT_EQ(cfg.doscor.query_radius, 0.2);
  EXPECT_FALSE(cfg.close_stages.sg);
  EXPECT_TRUE(cfg.close_stages.intensity);
}

TEST(Config, RejectsOutOfRangeWithName) {
  try {
    config_from_json(json::parse(R"({"r_th": 0.7})"));
    FAIL();
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("r_th"), std::string::npos);
    EXPECT_NE(msg.find("[0.2, 0.6]"), std::string::npos) << msg;
  }
}

TEST(Config, RejectsUnknownAndMistyped) {
  EXPECT_THROW(config_from_json(json::parse(R"({"r_maximum": 30})")), ParameterError);
  EXPECT_THROW(config_from_json(json::parse(R"({"doscor": {"radius": 0.1}})")), ParameterError);
  EXPECT_THROW(config_from_json(json::parse(R"({"r_max": "far"})")), ParameterError);
  EXPECT_THROW(config_from_json(json::parse(R"({"r_d": [4]})")), ParameterError);
  EXPECT_THROW(config_from_json(json::parse(R"({"K_nn": 4.5})")), ParameterError);
  EXPECT_THROW(config_from_json(json::parse("[]")), ParameterError);
}

TEST(Config, JsonRoundTrip) {
  PipelineConfig cfg;
  cfg.r_max = 55.0;
  cfg.rss_envelope = {{2.0, 0.5}};
  cfg.sg_long.mode = SgMode::replace;
  cfg.intensity.location = WeibullLocation::sample_min;
  cfg.long_stages.ror2d = false;
  const PipelineConfig back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST(Config, LoadFromFile) {
  TempDir dir;
  spit(dir / "c.json", R"({"K_nn": 3})");
  EXPECT_EQ(load_config(dir / "c.json").doscor.k_min, 3u);
  spit(dir / "broken.json", "{");
  EXPECT_THROW(load_config(dir / "broken.json"), DataError);
}

TEST(Report, Json) {
  FilterReport r;
  r.input = 10;
  r.filtered = 7;
  r.rejected = 3;
  r.stages.push_back({"doscor", "long", 5, 5, 0, 0.1, "too few points"});
  r.fit = WeibullParams{1.0, 2.0, 0.0};
  const json j = report_to_json(r);
  EXPECT_EQ(j.at("input"), 10);
  EXPECT_EQ(j.at("filtered").get<std::size_t>() + j.at("rejected").get<std::size_t>(), 10u);
  EXPECT_EQ(j.at("stages")[0].at("error"), "too few points");
  EXPECT_EQ(j.at("weibull").at("gamma"), 2.0);
  EXPECT_TRUE(j.at("timestamp").is_null());
}

TEST(SceneSpec, FromJson) {
  const SceneSpec s = scene_from_json(json::parse(R"({
    "seed": 7, "tunnel": {"spacing": 0.2},
    "blobs": [{"center": [12, 0, 0.5], "radius": 1.0, "points": 100}],
    "aerosol_intensity": {"alpha": 0.5}
  })"));
  EXPECT_EQ(s.seed, 7u);
  EXPECT_EQ(s.tunnel.spacing, 0.2);
  EXPECT_EQ(s.tunnel.length, 30.0);
  ASSERT_EQ(s.blobs.size(), 1u);
  EXPECT_EQ(s.blobs[0].points, 100u);
  EXPECT_EQ(s.aerosol_intensity.alpha, 0.5);
  EXPECT_EQ(s.aerosol_intensity.gamma, 3.613051);
  EXPECT_THROW(scene_from_json(json::parse(R"({"smoke": 1})")), ParameterError);
}
