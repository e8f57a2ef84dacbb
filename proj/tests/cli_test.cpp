// Copyright 2026 The ulab Authors.
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

// Runs the ulab binary named by ULAB_BIN as a subprocess.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "ulab/io.hpp"

namespace ulab {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char* bin = std::getenv("ULAB_BIN");
    if (!bin) GTEST_SKIP() << "ULAB_BIN not set";
    bin_ = bin;
    dir_ = fs::temp_directory_path() /
           ("ulab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!dir_.empty()) fs::remove_all(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of `ulab args`, with stdout to `out` and stderr to err.txt.
  int run(const std::string& args, const std::string& out = "stdout.txt",
          const std::string& env = "") {
    const std::string cmd = env + " '" + bin_ + "' " + args + " > '" + path(out) +
                            "' 2> '" + path("err.txt") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  Json json(const std::string& name) const { return read_json_file(path(name)); }

  std::string bin_;
  fs::path dir_;
};

TEST_F(CliTest, ExactCubicRecovered) {
  ASSERT_EQ(run("sample --p 5 --n 1 --out " + path("f.json")), 0);
  ASSERT_EQ(run("pipeline --input " + path("f.json") + " --out " + path("r.json")), 0);
  const Json r = json("r.json");
  EXPECT_EQ(r["schema"], "ulab.pipeline/1");
  EXPECT_EQ(r["status"], "ok");
  EXPECT_GE(r["result"]["correlation"].get<double>(), 0.999);
  EXPECT_EQ(r["result"]["cubic"]["text"], "1*x0 + 2*x0*x0 + 1*x0*x0*x0");
  EXPECT_TRUE(r.contains("timing"));
}

TEST_F(CliTest, CorruptedRunIsByteIdentical) {
  ASSERT_EQ(run("sample --p 5 --n 2 --corrupt 0.1 --seed 4 --out " + path("f.json")), 0);
  const std::string args = "pipeline --no-timing --input " + path("f.json");
  ASSERT_EQ(run(args, "a.json"), 0);
  ASSERT_EQ(run(args, "b.json", "ULAB_THREADS=1"), 0);
  EXPECT_EQ(slurp("a.json"), slurp("b.json"));
  EXPECT_GE(json("a.json")["result"]["correlation"].get<double>(), 0.5);
}

TEST_F(CliTest, TimingIsSeparable) {
  ASSERT_EQ(run("sample --p 5 --n 2 --out " + path("f.json")), 0);
  ASSERT_EQ(run("pipeline --input " + path("f.json"), "t.json"), 0);
  ASSERT_EQ(run("pipeline --no-timing --input " + path("f.json"), "n.json"), 0);
  Json t = json("t.json");
  ASSERT_TRUE(t.contains("timing"));
  t.erase("timing");
  EXPECT_EQ(t.dump(), json("n.json").dump());
}

TEST_F(CliTest, RandomInputHitsGate) {
  ASSERT_EQ(run("sample --p 5 --n 3 --random --out " + path("f.json")), 0);
  EXPECT_EQ(run("pipeline --input " + path("f.json"), "r.json"), 2);
  const Json r = json("r.json");
  EXPECT_EQ(r["halted_at"], "u4_gate");
  EXPECT_EQ(r["message"], "U^4 below threshold");
  EXPECT_FALSE(r.contains("result"));
  EXPECT_NE(slurp("err.txt").find("U^4 below threshold"), std::string::npos);
}

TEST_F(CliTest, ConfigFileIsApplied) {
  ASSERT_EQ(run("sample --p 5 --n 2 --corrupt 0.1 --out " + path("f.json")), 0);
  write_json_file(path("strict.json"), Json{{"u4_threshold", 0.99}});
  EXPECT_EQ(run("pipeline --input " + path("f.json") + " --config " + path("strict.json")), 2);
  write_json_file(path("bad.json"), Json{{"no_such_key", 1}});
  EXPECT_EQ(run("pipeline --input " + path("f.json") + " --config " + path("bad.json")), 1);
  write_json_file(path("group.json"), Json{{"p", 7}, {"n", 1}});
  EXPECT_EQ(run("pipeline --input " + path("f.json") + " --config " + path("group.json")), 2);
}

TEST_F(CliTest, VerifyOnlyOneModule) {
  ASSERT_EQ(run("verify --only galg --seed 3", "v.json"), 0);
  const Json v = json("v.json");
  EXPECT_EQ(v["schema"], "ulab.verify/1");
  EXPECT_TRUE(v["passed"].get<bool>());
  ASSERT_FALSE(v["checks"].empty());
  for (const auto& c : v["checks"]) EXPECT_EQ(c["module"], "galg");
}

TEST_F(CliTest, InjectedFaultFailsParseval) {
  EXPECT_EQ(run("verify --only core --inject-fault corrupt-dft", "v.json"), 3);
  const Json v = json("v.json");
  EXPECT_FALSE(v["passed"].get<bool>());
  bool parseval_failed = false;
  for (const auto& c : v["checks"])
    if (c["name"] == "parseval") parseval_failed = !c["passed"].get<bool>();
  EXPECT_TRUE(parseval_failed);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("pipeline"), 1);
  EXPECT_EQ(run("verify --only nothing"), 1);
  EXPECT_EQ(run("verify --inject-fault other"), 1);
  std::ofstream(path("junk.json")) << "{not json";
  EXPECT_EQ(run("pipeline --input " + path("junk.json")), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, NormsOfCubicPhase) {
  ASSERT_EQ(run("sample --p 5 --n 2 --out " + path("f.json")), 0);
  ASSERT_EQ(run("norms --input " + path("f.json"), "n.json"), 0);
  const Json n = json("n.json");
  EXPECT_EQ(n["group"], "F_5^2");
  EXPECT_NEAR(n["U4"].get<double>(), 1.0, 1e-12);
  EXPECT_LT(n["U2"].get<double>(), 1.0);
}

}  // namespace
}  // namespace ulab
