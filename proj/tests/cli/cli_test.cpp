// Copyright 2026 The snakecr Authors.
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
};

Result Cli(const std::string& args) {
  const std::string cmd = std::string(SNAKECR_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("snakecr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, VerifyModelPassesWithGrowthVector) {
  const Result r = Cli("verify-model --s1 1 --s2 1/2 --s3 1 --out " + Path("vm.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  const json j = json::parse(Slurp(Path("vm.json")));
  EXPECT_EQ(j["schema"], "snakecr.report/1");
  EXPECT_EQ(j["summary"]["status"], "pass");
  bool found = false;
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("tolerance"));
    EXPECT_TRUE(c.contains("value"));
    if (c["id"] == "growth_symbolic") {
      found = true;
      EXPECT_EQ(c["value"], json::array({2, 3, 5}));
    }
  }
  EXPECT_TRUE(found);
  std::map<std::string, std::string> verdict;
  for (const auto& e : j["discrepancy"]["entries"]) verdict[e["id"]] = e["verdict"];
  EXPECT_EQ(verdict["Upsilon3"], "sign-flip");
  EXPECT_EQ(verdict["xi5"], "sign-flip");
  EXPECT_EQ(verdict["h1"], "match");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli("verify-model --s2 0").code, 2);
  EXPECT_EQ(Cli("verify-model --s1 -1").code, 2);
  EXPECT_EQ(Cli("verify-model --s2 0.5x").code, 2);
  EXPECT_EQ(Cli("no-such-command").code, 2);
  EXPECT_EQ(Cli("").code, 2);
  EXPECT_EQ(Cli("coframe --s2 1/3").code, 2);
  EXPECT_EQ(Cli("invariants --mode fancy").code, 2);
  EXPECT_EQ(Cli("verify-model --help").code, 0);
}

TEST_F(CliTest, SolveAwayFromHalfIsEmpty) {
  const Result r = Cli("solve-J --s2 1/3 --s1 1 --s3 1 --out " + Path("sj.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("solution set: empty"), std::string::npos) << r.out;
  const json j = json::parse(Slurp(Path("sj.json")));
  EXPECT_EQ(j["checks"][0]["data"]["status"], "empty");
}

TEST_F(CliTest, SolveAtHalfFindsPair) {
  const Result r = Cli("solve-J --out " + Path("sj.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  const json j = json::parse(Slurp(Path("sj.json")));
  EXPECT_EQ(j["checks"][0]["value"], 2);
  EXPECT_EQ(j["checks"][0]["data"]["solutions"].size(), 2u);
}

TEST_F(CliTest, CoframeFailsOnlyOnHolomorphy) {
  const Result r = Cli("coframe --out " + Path("cf.json"));
  EXPECT_EQ(r.code, 1) << r.out;
  const json j = json::parse(Slurp(Path("cf.json")));
  for (const auto& c : j["checks"]) EXPECT_EQ(c["status"] == "fail", c["id"] == "holomorphy") << c["id"];
}

TEST_F(CliTest, ReportsAreByteIdentical) {
  for (const std::string cmd : {"verify-model", "solve-J", "coframe"}) {
    Cli(cmd + " --out " + Path("a.json"));
    Cli(cmd + " --out " + Path("b.json"));
    const std::string a = Slurp(Path("a.json"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, Slurp(Path("b.json"))) << cmd;
  }
  const std::string inv = "invariants --points 3 --threads 3 --no-reduction --seed 11 --out ";
  Cli(inv + Path("a.json"));
  Cli(inv + Path("b.json"));
  EXPECT_EQ(Slurp(Path("a.json")), Slurp(Path("b.json")));
}

TEST_F(CliTest, TimingIsOptIn) {
  Cli("solve-J --out " + Path("a.json"));
  Cli("solve-J --timing --out " + Path("b.json"));
  EXPECT_FALSE(json::parse(Slurp(Path("a.json"))).contains("timing"));
  EXPECT_TRUE(json::parse(Slurp(Path("b.json"))).contains("timing"));
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  const std::string cmd = "SNAKECR_OUT_DIR=" + dir_.string() + " " + SNAKECR_CLI + " solve-J > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "solve-J.json"));
}

TEST_F(CliTest, EmptySweepSucceeds) {
  const Result r = Cli("sweep --grid '' --out " + Path("sw.json") + " --csv " + Path("sw.csv"));
  EXPECT_EQ(r.code, 0) << r.out;
  const json j = json::parse(Slurp(Path("sw.json")));
  EXPECT_TRUE(j["checks"].empty());
  EXPECT_EQ(Slurp(Path("sw.csv")), "s1_s3,status,J,T,S,L,Q,G,V,N,K,F,B,A,highlighted,error\n");
}

TEST_F(CliTest, SweepIsolatesFailingCell) {
  const Result r = Cli("sweep --grid 1,0 --points 2 --out " + Path("sw.json") + " --csv " + Path("sw.csv"));
  EXPECT_EQ(r.code, 1) << r.out;
  const json j = json::parse(Slurp(Path("sw.json")));
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["id"], "cells_completed");
  EXPECT_EQ(j["checks"][0]["value"], 1);
  const json& cells = j["checks"][1]["data"]["cells"];
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_NE(cells[0]["status"], "error");
  EXPECT_TRUE(cells[0]["magnitudes"].contains("J"));
  EXPECT_EQ(cells[1]["status"], "error");
  EXPECT_EQ(Cli("sweep --grid 1,x").code, 2);
}

TEST_F(CliTest, SimulateWritesTrajectory) {
  std::ofstream(Path("u.csv")) << "t,u1,u2\n0,1,0.5\n0.5,-0.3,1\n";
  const Result r = Cli("simulate --controls " + Path("u.csv") + " --q0 0,0,0,0.4,-0.7 --dt 1e-2 --T 1 --out " +
                       Path("t.csv") + " --report " + Path("s.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  std::ifstream f(Path("t.csv"));
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "t,x,y,theta,phi,psi,h1,h2,h3,upsilon1,upsilon2,upsilon3,frame_det");
  int rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  EXPECT_EQ(rows, 101);
  EXPECT_EQ(json::parse(Slurp(Path("s.json")))["summary"]["status"], "pass");
}

TEST_F(CliTest, SimulateHaltsOnDegenerateFrame) {
  std::ofstream(Path("u.csv")) << "0,1,0\n";
  const std::string base = "simulate --controls " + Path("u.csv") + " --q0 0,0,0,0.5,-0.5 --T 0.1 --out " + Path("t.csv");
  EXPECT_EQ(Cli(base).code, 1);
  EXPECT_EQ(Cli(base + " --allow-degenerate").code, 0);
  EXPECT_EQ(Cli(base + " --q0 1,2").code, 2);
  EXPECT_EQ(Cli("simulate --controls " + Path("missing.csv")).code, 2);
  std::ofstream(Path("bad.csv")) << "0,1\n";
  EXPECT_EQ(Cli("simulate --controls " + Path("bad.csv") + " --out " + Path("t.csv")).code, 2);
}

}  // namespace
