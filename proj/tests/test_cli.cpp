// SPDX-FileCopyrightText: 2026 The smokefilter authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <json.hpp>

#include "smokefilter/io.hpp"

using namespace smokefilter;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("smokefilter_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of the CLI; stdout and stderr go to a log in the temp dir.
  int run(const std::string& args) const {
    const std::string cmd = std::string("\"") + SMOKEFILTER_CLI + "\" " + args + " >\"" + path("log.txt") + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string log() const { return slurp(path("log.txt")); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --output " + path("a.pcd") + " --seed 3 --points 5000"), 0) << log();
  ASSERT_EQ(run("synth --output " + path("b.pcd") + " --seed 3 --points 5000"), 0) << log();
  EXPECT_EQ(slurp(path("a.pcd")), slurp(path("b.pcd")));
  EXPECT_EQ(slurp(path("a.labels.csv")), slurp(path("b.labels.csv")));
  const PointCloud c = read_cloud(path("a.pcd"));
  EXPECT_EQ(read_labels(path("a.labels.csv")).size(), c.size());
  ASSERT_EQ(run("synth --output " + path("c.pcd") + " --seed 4 --points 5000"), 0);
  EXPECT_NE(slurp(path("a.pcd")), slurp(path("c.pcd")));
}

TEST_F(CliTest, FilterEmptyCloudWithDefaults) {
  write_cloud(PointCloud{}, path("empty.pcd"));
  ASSERT_EQ(run("filter --input " + path("empty.pcd") + " --output " + path("out.pcd") + " --report " +
                path("r.json")),
            0)
      << log();
  EXPECT_TRUE(read_cloud(path("out.pcd")).empty());
  const json r = json::parse(slurp(path("r.json")));
  EXPECT_EQ(r.at("config_source"), "defaults");
  EXPECT_EQ(r.at("input"), 0);
}

TEST_F(CliTest, FilterPartitionsInput) {
  ASSERT_EQ(run("synth --output " + path("s.pcd") + " --points 8000"), 0) << log();
  std::ofstream(path("cfg.json")) << R"({"K_nn": 5})";
  ASSERT_EQ(run("filter --input " + path("s.pcd") + " --config " + path("cfg.json") + " --output " +
                path("f.csv") + " --rejected " + path("rej.pcd") + " --rejected-indices " + path("ri.csv") +
                " --report " + path("r.json")),
            0)
      << log();
  const std::size_t n = read_cloud(path("s.pcd")).size();
  const std::size_t kept = read_cloud(path("f.csv")).size();
  const std::size_t rejected = read_cloud(path("rej.pcd")).size();
  EXPECT_EQ(kept + rejected, n);
  EXPECT_EQ(read_indices(path("ri.csv")).size(), rejected);
  const json r = json::parse(slurp(path("r.json")));
  EXPECT_EQ(r.at("config_source"), path("cfg.json"));
  EXPECT_EQ(r.at("config").at("K_nn"), 5);
  EXPECT_EQ(r.at("filtered").get<std::size_t>() + r.at("rejected").get<std::size_t>(), n);
}

TEST_F(CliTest, FilterDirectoryStream) {
  fs::create_directories(path("frames"));
  for (int i = 0; i < 3; ++i) {
    ASSERT_EQ(run("synth --output " + path("frames/frame_" + std::to_string(i) + ".pcd") + " --points 3000 --seed " +
                  std::to_string(i)),
              0);
  }
  ASSERT_EQ(run("filter --input " + path("frames") + " --output " + path("out") + " --report " + path("r.json")), 0)
      << log();
  const json r = json::parse(slurp(path("r.json")));
  ASSERT_EQ(r.at("frames").size(), 3u);
  EXPECT_EQ(r.at("frames")[1].at("timestamp"), 0.1);
  EXPECT_TRUE(fs::exists(path("out/frame_2.pcd")));
}

TEST_F(CliTest, EvalPerfectRejection) {
  ASSERT_EQ(run("synth --output " + path("s.pcd") + " --points 4000"), 0);
  const auto labels = read_labels(path("s.labels.csv"));
  std::vector<std::size_t> aerosol;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::aerosol) aerosol.push_back(i);
  }
  write_indices(aerosol, path("perfect.csv"));
  ASSERT_EQ(run("eval --input " + path("s.pcd") + " --labels " + path("s.labels.csv") + " --rejected " +
                path("perfect.csv") + " --output " + path("m.csv")),
            0)
      << log();
  const std::string m = slurp(path("m.csv"));
  EXPECT_EQ(m.substr(0, m.find('\n')), "scene,config,tp,fp,fn,tn,precision,recall,f1");
  EXPECT_NE(m.find("," + std::to_string(aerosol.size()) + ",0,0,"), std::string::npos) << m;
  EXPECT_NE(m.find(",1,1,1\n"), std::string::npos) << m;
}

TEST_F(CliTest, EvalWithBaselines) {
  ASSERT_EQ(run("synth --output " + path("s.pcd") + " --points 4000"), 0);
  ASSERT_EQ(run("eval --input " + path("s.pcd") + " --labels " + path("s.labels.csv") +
                " --baseline ror --baseline lior --output " + path("m.csv")),
            0)
      << log();
  const std::string m = slurp(path("m.csv"));
  EXPECT_NE(m.find(",pipeline,"), std::string::npos);
  EXPECT_NE(m.find(",ror,"), std::string::npos);
  EXPECT_NE(m.find(",lior,"), std::string::npos);
}

TEST_F(CliTest, ErrorExitCodes) {
  ASSERT_EQ(run("synth --output " + path("s.pcd") + " --points 3000"), 0);
  ASSERT_EQ(run("synth --output " + path("t.pcd") + " --points 6000"), 0);
  EXPECT_EQ(run("eval --input " + path("s.pcd") + " --labels " + path("t.labels.csv") + " --output " + path("m.csv")), 2);
  EXPECT_NE(log().find("labels"), std::string::npos) << log();
  EXPECT_EQ(run("filter --input " + path("s.pcd") + " --no-such-flag"), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("filter --input " + path("missing.pcd")), 2);
  EXPECT_NE(log().find("missing.pcd"), std::string::npos) << log();
  std::ofstream(path("bad.json")) << R"({"r_th": 0.9})";
  EXPECT_EQ(run("filter --input " + path("s.pcd") + " --config " + path("bad.json")), 2);
  EXPECT_NE(log().find("r_th"), std::string::npos) << log();
}

TEST_F(CliTest, HistWritesFit) {
  ASSERT_EQ(run("synth --output " + path("s.pcd") + " --points 4000"), 0);
  ASSERT_EQ(run("hist --input " + path("s.pcd") + " --output " + path("h.csv") + " --bins 51"), 0) << log();
  const std::string h = slurp(path("h.csv"));
  EXPECT_EQ(h.rfind("# weibull alpha=", 0), 0u) << h.substr(0, 80);
  EXPECT_EQ(std::count(h.begin(), h.end(), '\n'), 53);  // fit line, column header, 51 bins
}

TEST_F(CliTest, BenchSmall) {
  ASSERT_EQ(run("bench --sizes 500,1000 --reps 10 --output " + path("b.csv")), 0) << log();
  const std::string b = slurp(path("b.csv"));
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 3);
  EXPECT_EQ(run("bench --sizes 500 --reps 3"), 1);
}
