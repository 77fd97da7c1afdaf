// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "gtest/gtest.h"

namespace coba::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("coba_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& content) {
    const std::string path = (dir_ / name).string();
    WriteFile(path, content);
    return path;
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kGolden = COBA_TEST_GOLDEN_DIR;

TEST_F(CliTest, AllocateGoldenInstance) {
  const CliRun r = Cli({"allocate", "--input", kGolden + "/allocate_m3.csv", "--alpha", "2",
                     "--beta", "5", "--tau", "4", "--b-total", "12", "--b-up", "6",
                     "--solver", "brute"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["budgets"]["a"], 6);
  EXPECT_EQ(doc["budgets"]["b"], 4);
  EXPECT_EQ(doc["budgets"]["c"], 2);
  EXPECT_NEAR(doc["aggregate_value"].get<double>(), 0.7347099668121494, 1e-12);
  EXPECT_EQ(r.out, ReadFile(kGolden + "/allocate_m3.json"));
}

TEST_F(CliTest, AllocateSolversAgreeAndWriteFile) {
  const std::string input = Write("in.json",
                                  R"([{"id":"x","p":0.1},{"id":"y","p":0.6},)"
                                  R"({"id":"z","p":0.95},{"id":"w","p":0.0}])");
  std::vector<double> values;
  for (const std::string solver : {"greedy", "dp", "brute"}) {
    const std::string output = Path(solver + ".json");
    const CliRun r = Cli({"allocate", "--input", input, "--solver", solver, "--b-up", "16",
                       "--output", output});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto doc = nlohmann::json::parse(ReadFile(output));
    std::int64_t total = 0;
    for (const auto& [id, b] : doc["budgets"].items()) total += b.get<std::int64_t>();
    EXPECT_EQ(total, 64);
    values.push_back(doc["aggregate_value"].get<double>());
  }
  EXPECT_NEAR(values[0], values[1], 1e-9);
  EXPECT_NEAR(values[0], values[2], 1e-9);
}

TEST_F(CliTest, AllocateDerivesScheduleFromRates) {
  // Mean pass rate 0.7: F = 0.3, psi = sigmoid(-2), alpha = 1 + 9 * psi.
  const std::string input = Write("in.csv", "task_id,pass_rate\na,0.7\nb,0.7\n");
  const CliRun r = Cli({"allocate", "--input", input});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["alpha"].get<double>(), 1.0 + 9.0 * 0.11920292202211757, 1e-12);
  EXPECT_NEAR(doc["alpha"].get<double>() + doc["beta"].get<double>(), 11.0, 1e-12);
}

TEST_F(CliTest, AllocateInputErrors) {
  const std::string out_of_range = Write("bad.csv", "task_id,pass_rate\na,0.5\nb,1.3\n");
  CliRun r = Cli({"allocate", "--input", out_of_range});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.csv:3:3: pass_rate out of range"), std::string::npos) << r.err;

  const std::string not_number = Write("nan.csv", "task_id,pass_rate\nabc,x\n");
  r = Cli({"allocate", "--input", not_number});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nan.csv:2:5:"), std::string::npos) << r.err;

  const std::string bad_json = Write("bad.json", "[\n  {\"id\": \"a\", \"p\": 0.5},\n  {\"id\" 1}\n]");
  r = Cli({"allocate", "--input", bad_json});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.json:3:9:"), std::string::npos) << r.err;

  r = Cli({"allocate", "--input", Path("missing.csv")});
  EXPECT_EQ(r.code, 2);
  r = Cli({"allocate", "--input", out_of_range, "--alpha", "2"});
  EXPECT_EQ(r.code, 2);
  r = Cli({"allocate"});
  EXPECT_EQ(r.code, 2);
  r = Cli({"allocate", "--input", kGolden + "/allocate_m3.csv", "--solver", "magic"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, AllocateInfeasible) {
  const CliRun r = Cli({"allocate", "--input", kGolden + "/allocate_m3.csv", "--b-total", "5"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST_F(CliTest, HelpAndUnknownSubcommand) {
  EXPECT_EQ(Cli({"--help"}).code, 0);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({}).code, 2);
}

TEST_F(CliTest, SimulateAllEasyUniform) {
  const std::string config = Write(
      "cfg.json",
      R"({"task_count": 8, "steps": 5, "sampler": "buckets", "bucket_weights": [0, 0, 0, 0, 1]})");
  const CliRun r = Cli({"simulate", "--config", config, "--strategy", "uniform", "--out-dir",
                     Path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(r.out);
  EXPECT_EQ(summary["final_success"].get<double>(), 1.0);
  for (const char* f : {"metrics.csv", "transition.json", "store.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const std::string csv = ReadFile(Path("out/metrics.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kMetricsHeader);
  const auto manifest = nlohmann::json::parse(ReadFile(Path("out/manifest.json")));
  EXPECT_EQ(manifest["outputs"]["metrics.csv"], Sha256Hex(csv));
  EXPECT_EQ(manifest["strategy"]["kind"], "uniform");
}

TEST_F(CliTest, SimulateErrors) {
  EXPECT_EQ(Cli({"simulate", "--config", Path("nope.json")}).code, 2);
  const std::string bad = Write("bad.json", R"({"steps": "many", "speed": 3})");
  const CliRun r = Cli({"simulate", "--config", bad, "--out-dir", Path("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("steps (expected integer)"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("speed (unknown field)"), std::string::npos) << r.err;
  const std::string ok = Write("ok.json", R"({"task_count": 4, "steps": 2})");
  EXPECT_EQ(Cli({"simulate", "--config", ok, "--strategy", "greedy-ish"}).code, 2);
  const std::string tight = Write("tight.json", R"({"task_count": 4, "b_total": 4})");
  EXPECT_EQ(Cli({"simulate", "--config", tight, "--out-dir", Path("t")}).code, 3);
}

TEST_F(CliTest, ManifestReplayIsByteIdentical) {
  const std::string config = Write("cfg.json", R"({"task_count": 24, "steps": 15, "seed": 11})");
  ASSERT_EQ(Cli({"simulate", "--config", config, "--strategy", "static", "--alpha", "3",
                 "--beta", "8", "--out-dir", Path("first")})
                .code,
            0);
  ASSERT_EQ(Cli({"simulate", "--config", Path("first/manifest.json"), "--out-dir",
                 Path("second")})
                .code,
            0);
  for (const char* f : {"metrics.csv", "transition.json", "store.json", "manifest.json"}) {
    EXPECT_EQ(ReadFile(Path(std::string("first/") + f)),
              ReadFile(Path(std::string("second/") + f)))
        << f;
  }
}

TEST_F(CliTest, Compare) {
  const std::string config = Write("cfg.json", R"({"task_count": 16, "steps": 8})");
  const CliRun r = Cli({"compare", "--config", config, "--strategies",
                     "coba,uniform,static:1.5:10.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["reports"].size(), 3u);
  EXPECT_EQ(doc["reports"][2]["strategy"], "static(1.5,10.5)");
  EXPECT_EQ(doc["reports"][0]["value_trajectory"].size(), 8u);
  EXPECT_EQ(Cli({"compare", "--config", config, "--strategies", "coba"}).code, 2);
  EXPECT_EQ(Cli({"compare", "--config", config, "--strategies", "coba,static:x"}).code, 2);
}

TEST_F(CliTest, Bench) {
  CliRun r = Cli({"bench", "--m", "4", "--repeats", "1", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["b_total"], 64);
  EXPECT_TRUE(doc["equal_value"].get<bool>());
  EXPECT_GE(doc["greedy_median_s"].get<double>(), 0.0);

  r = Cli({"bench", "--m", "4", "--repeats", "1", "--dp-memory-cap", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dp_median_s=null"), std::string::npos) << r.out;

  EXPECT_EQ(Cli({"bench", "--m", "4", "--b-total", "1"}).code, 3);
  EXPECT_EQ(Cli({"bench", "--m", "0"}).code, 2);
}

TEST_F(CliTest, VerifyPristineGoldens) {
  const CliRun r = Cli({"verify"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["pass"].get<bool>());
}

TEST_F(CliTest, VerifyDetectsCorruption) {
  fs::copy(kGolden, dir_ / "g", fs::copy_options::recursive);
  const std::string target = Path("g/allocate_m3.json");
  std::string content = ReadFile(target);
  content.replace(content.find("\"a\": 6"), 6, "\"a\": 5");
  WriteFile(target, content);
  const CliRun r = Cli({"verify", "--golden-dir", Path("g")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FAIL allocate_m3"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.find("FAIL population_m3"), std::string::npos) << r.err;
}

TEST_F(CliTest, VerifyRegenerateIntoFreshDirectory) {
  fs::create_directories(dir_ / "g");
  fs::copy(kGolden + "/value_examples.json", dir_ / "g" / "value_examples.json");
  const CliRun r = Cli({"verify", "--golden-dir", Path("g"), "--regenerate"});
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"allocate_m3.json", "population_m3.json"}) {
    EXPECT_EQ(ReadFile(Path(std::string("g/") + f)), ReadFile(kGolden + "/" + f)) << f;
  }
}

TEST(CliIoTest, Sha256KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace coba::cli
