// SPDX-License-Identifier: Apache-2.0
//
// isac-arrays: joint beamforming simulation for dissimilar mono-static arrays
// Copyright (C) 2026 The isac-arrays authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "isac/cli.hpp"

using namespace isac;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "isac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("isac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir_;
};

std::vector<std::vector<double>> read_rows(const std::string& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(f, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

} // namespace

TEST(CliHelpers, ParseArray) {
  const auto a = cli::parse_array("3@2.0");
  EXPECT_EQ(a.n_1d, 3);
  EXPECT_EQ(a.spacing, 2.0);
  EXPECT_THROW(cli::parse_array("3x2"), cli::config_error);
  EXPECT_THROW(cli::parse_array("3@"), cli::config_error);
  EXPECT_THROW(cli::parse_array("0@0.5"), cli::config_error);
  EXPECT_THROW(cli::parse_array("3@0.5abc"), cli::config_error);
}

TEST(CliHelpers, Fnv1aReferenceValues) {
  EXPECT_EQ(cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(cli::fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(CliHelpers, ConfigRoundTrip) {
  cli::RunConfig a;
  cli::apply_json(a, cli::json::parse(R"({"sensing": {"n_1d": 5, "spacing": 1.5}, "trials": 12, "seed": 99,
      "targets": [{"l": 0.1, "eta": -0.2, "phase": 1.0}], "noise_db": -20, "psf": {"kind": "sensing", "cut": true}})"));
  EXPECT_EQ(a.sensing.n_1d, 5);
  EXPECT_EQ(a.experiment.trials, 12);
  EXPECT_EQ(a.experiment.seed, 99u);
  ASSERT_EQ(a.targets.size(), 1u);
  cli::RunConfig b;
  cli::apply_json(b, cli::to_json(a));
  EXPECT_EQ(cli::to_json(a), cli::to_json(b));
  EXPECT_EQ(cli::config_hash(cli::to_json(a)), cli::config_hash(cli::to_json(b)));
  b.experiment.seed = 100;
  EXPECT_NE(cli::config_hash(cli::to_json(a)), cli::config_hash(cli::to_json(b)));
}

TEST(CliHelpers, ConfigRejectsUnknownAndMistyped) {
  cli::RunConfig c;
  EXPECT_THROW(cli::apply_json(c, cli::json::parse(R"({"trails": 3})")), cli::config_error);
  EXPECT_THROW(cli::apply_json(c, cli::json::parse(R"({"trials": "many"})")), cli::config_error);
  EXPECT_THROW(cli::apply_json(c, cli::json::parse(R"({"comms": {"n_1d": 11}})")), cli::config_error);
  EXPECT_THROW(cli::apply_json(c, cli::json::parse(R"({"seed": -1})")), cli::config_error);
  EXPECT_THROW(cli::apply_json(c, cli::json::parse(R"([1, 2])")), cli::config_error);
}

TEST(CliHelpers, CsvFormatting) {
  cli::CsvTable t({"a", "b"});
  t.add({1.0, -0.125});
  t.add({1e-12, 3.0});
  EXPECT_EQ(t.str(), "a,b\n1,-0.125\n1e-12,3\n");
  EXPECT_THROW(t.add({1.0}), isac::internal_error);
}

TEST_F(CliTest, VerifyRejectsMalformedFiles) {
  const std::vector<std::string> h{"x", "y"};
  EXPECT_EQ(cli::verify_csv(write("ok.csv", "x,y\n1,2\n3,4\n"), h), 2u);
  EXPECT_THROW(cli::verify_csv(write("hdr.csv", "x,z\n1,2\n"), h), std::runtime_error);
  EXPECT_THROW(cli::verify_csv(write("width.csv", "x,y\n1,2,3\n"), h), std::runtime_error);
  EXPECT_THROW(cli::verify_csv(write("text.csv", "x,y\n1,abc\n"), h), std::runtime_error);
  EXPECT_THROW(cli::verify_csv(write("nl.csv", "x,y\n1,2"), h), std::runtime_error);
  EXPECT_THROW(cli::verify_csv(write("nan.csv", "x,y\n1,nan\n"), h), std::runtime_error);
}

TEST_F(CliTest, CoarraySetups) {
  auto r = run_cli({"coarray", "--sensing", "3@2.0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n_1d=19"), std::string::npos);
  r = run_cli({"coarray", "--sensing", "9@0.5", "--out", path("co.csv"), "--verify"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n_1d=19"), std::string::npos);
  EXPECT_EQ(read_rows(path("co.csv")).size(), 19u * 19u);
  EXPECT_TRUE(fs::exists(path("co.csv.manifest.json")));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli({"coarray", "--sensing", "3@0.75"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"coarray", "--sensing", "2@6.0"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"psf"}).code, cli::kUsage); // --out is required
  EXPECT_EQ(run_cli({"sweep", "--config", path("missing.json"), "--out", path("s.csv")}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"sweep", "--trials", "0", "--out", path("s.csv")}).code, cli::kUsage);
  const auto bad = write("bad.json", R"({"trials": 10, "mystery": 1})");
  EXPECT_EQ(run_cli({"sweep", "--config", bad, "--out", path("s.csv")}).code, cli::kUsage);
  const auto broken = write("broken.json", "{");
  EXPECT_EQ(run_cli({"sweep", "--config", broken, "--out", path("s.csv")}).code, cli::kUsage);
  const auto strict = write("strict.json", R"({"q_max": 1})");
  EXPECT_EQ(run_cli({"psf", "--config", strict, "--out", path("p.csv")}).code, cli::kConvergence);
  EXPECT_EQ(run_cli({"--version"}).code, cli::kOk);
}

TEST_F(CliTest, SparseCutShowsGratingLobes) {
  const auto r = run_cli({"psf", "--kind", "sensing", "--cut", "--out", path("s.csv"), "--verify"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(path("s.csv"));
  ASSERT_EQ(rows.size(), 152u);
  for (const auto& row : rows)
    if (std::abs(std::abs(row[0]) - 0.25) < 1e-9 || std::abs(row[0]) < 1e-12) EXPECT_GT(row[2], -3.0);
}

TEST_F(CliTest, JointCutSidelobesAndBoresight) {
  const auto r = run_cli({"psf", "--cut", "--out", path("j.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_rows(path("j.csv"));
  const double edge = mainlobe_edge_naf(19, TaperSpec(45.0));
  for (const auto& row : rows) {
    if (std::abs(row[0]) < 1e-12) EXPECT_NEAR(row[2], 0.0, 1e-6);
    if (std::abs(row[0]) > edge + 1.0 / 152) EXPECT_LE(row[2], -44.5) << "l=" << row[0];
  }
  const auto manifest = cli::json::parse(slurp(path("j.csv.manifest.json")));
  EXPECT_EQ(manifest.at("command"), "psf");
  EXPECT_EQ(manifest.at("seed"), 1u);
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16u);
  EXPECT_LE(manifest.at("results").at("residual").get<double>(), 1e-6);
  EXPECT_TRUE(manifest.at("timestamps").contains("started"));
}

TEST_F(CliTest, NoiselessImageHasTwoPeaks) {
  const auto cfg = write("img.json", R"({"sensing": {"n_1d": 3, "spacing": 2.0},
      "targets": [{"l": 0.2, "eta": 0.1}, {"l": -0.15, "eta": -0.25, "phase": 1.5}]})");
  const auto r = run_cli({"image", "--config", cfg, "--noiseless", "--out", path("i.csv"), "--verify"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = cli::json::parse(slurp(path("i.csv.manifest.json")));
  EXPECT_EQ(m.at("results").at("hits"), 2);
  EXPECT_EQ(m.at("results").at("misses"), 0);
  EXPECT_EQ(read_rows(path("i.csv")).size(), 152u * 152u);
}

TEST_F(CliTest, ImageDeterministicUnderSeed) {
  ASSERT_EQ(run_cli({"image", "--delta", "0.1", "--seed", "5", "--out", path("a.csv")}).code, 0);
  ASSERT_EQ(run_cli({"image", "--delta", "0.1", "--seed", "5", "--out", path("b.csv")}).code, 0);
  ASSERT_EQ(run_cli({"image", "--delta", "0.1", "--seed", "6", "--out", path("c.csv")}).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, EmptySceneIsANoiseFloor) {
  ASSERT_EQ(run_cli({"image", "--out", path("n.csv")}).code, 0);
  const auto rows = read_rows(path("n.csv"));
  double mean = 0.0;
  for (const auto& row : rows) mean += std::pow(10.0, row[2] / 10.0);
  mean /= static_cast<double>(rows.size());
  const auto m = cli::json::parse(slurp(path("n.csv.manifest.json")));
  const double expected = 0.1 * m.at("results").at("noise_gain").get<double>();
  EXPECT_NEAR(mean / expected, 1.0, 0.05);
}

TEST_F(CliTest, SweepCsvIsThreadIndependent) {
  const auto cfg = write("sw.json", R"({"sensing_variants": [{"n_1d": 3, "spacing": 2.0}, {"n_1d": 5, "spacing": 0.5}],
      "delta_grid": [0.06, 0.14], "trials": 8, "seed": 4})");
  auto r = run_cli({"sweep", "--config", cfg, "--threads", "1", "--out", path("s1.csv"), "--verify"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"sweep", "--config", cfg, "--threads", "4", "--out", path("s4.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(path("s1.csv"));
  EXPECT_EQ(text, slurp(path("s4.csv")));
  EXPECT_EQ(text.substr(0, text.find('\n')), "variant_n,variant_d,delta,pmd,ci_lo,ci_hi,trials");
  EXPECT_EQ(read_rows(path("s1.csv")).size(), 4u);
  const auto m = cli::json::parse(slurp(path("s1.csv.manifest.json")));
  EXPECT_EQ(m.at("results").at("curves").size(), 2u);
  EXPECT_EQ(m.at("params").at("trials"), 8);
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const auto cfg = write("o.json", R"({"sensing_variants": [{"n_1d": 3, "spacing": 2.0}], "delta_grid": [0.1],
      "trials": 50, "seed": 4})");
  ASSERT_EQ(run_cli({"sweep", "--config", cfg, "--trials", "3", "--seed", "8", "--sensing", "5@0.5", "--out",
                     path("o.csv")})
                .code,
            0);
  const auto m = cli::json::parse(slurp(path("o.csv.manifest.json")));
  EXPECT_EQ(m.at("params").at("trials"), 3);
  EXPECT_EQ(m.at("seed"), 8u);
  EXPECT_EQ(m.at("params").at("sensing_variants").at(0).at("n_1d"), 5);
}
