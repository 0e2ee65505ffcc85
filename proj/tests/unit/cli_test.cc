// Copyright 2026 The sqlcov Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sqlcov/common/strings.h"
#include "sqlcov/fuzz/loop.h"
#include "support/toy_env.h"

namespace sqlcov {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out, err;
};

std::string Quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

class CliTest : public ::testing::Test {
 protected:
  CliRun Sqlcov(const std::vector<std::string>& args) {
    std::string cmd = Quote(SQLCOV_CLI);
    for (const auto& a : args) cmd += " " + Quote(a);
    const fs::path out = dir_.path() / "stdout", err = dir_.path() / "stderr";
    cmd += " >" + Quote(out.string()) + " 2>" + Quote(err.string());
    int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = ReadFile(out.string());
    r.err = ReadFile(err.string());
    return r;
  }

  std::vector<std::string> ManifestPaths() const {
    std::vector<std::string> out;
    for (const char* b : {"gateway", "query", "storage"})
      out.push_back((testing::kManifestDir / (std::string(b) + ".cfg")).string());
    return out;
  }

  // Writes a layout and a campaign config rooted in the scratch directory.
  fs::path WriteConfig(const std::string& seed_dir, const std::string& extra = "") {
    std::vector<std::string> args = {"plan"};
    for (auto& m : ManifestPaths()) args.push_back(m);
    args.push_back("-o");
    args.push_back((dir_.path() / "layout.txt").string());
    EXPECT_EQ(Sqlcov(args).code, 0);
    const fs::path cfg = dir_.path() / "campaign.cfg";
    WriteFile(cfg.string(), "config_version=1\n"
                            "seed_dir=" + seed_dir + "\n"
                            "dictionary=" + (testing::kDataDir / "sql.dict").string() + "\n"
                            "layout=layout.txt\n"
                            "target_dir=" + testing::kTargetDir.string() + "\n"
                            "reports_dir=reports\n"
                            "stats=stats.csv\n"
                            "budget_seconds=60\n" + extra);
    return cfg;
  }

  testing::TempDir dir_{"cli"};
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Sqlcov({}).code, 1);
  EXPECT_EQ(Sqlcov({"frobnicate"}).code, 1);
  EXPECT_EQ(Sqlcov({"plan"}).code, 1);
  EXPECT_EQ(Sqlcov({"plan", (dir_.path() / "missing.cfg").string()}).code, 1);
  EXPECT_EQ(Sqlcov({"fuzz"}).code, 1);
  EXPECT_EQ(Sqlcov({"fuzz", "-c", (dir_.path() / "missing.cfg").string()}).code, 1);
  EXPECT_EQ(Sqlcov({"stats", (dir_.path() / "missing.csv").string()}).code, 1);
  EXPECT_EQ(Sqlcov({"triage", (dir_.path() / "missing").string()}).code, 1);
  EXPECT_EQ(Sqlcov({"--help"}).code, 0);
}

TEST_F(CliTest, PlanIsDeterministicAndCoversAllBinaries) {
  std::vector<std::string> args = {"plan"};
  for (auto& m : ManifestPaths()) args.push_back(m);
  CliRun a = Sqlcov(args);
  CliRun b = Sqlcov(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto layout = planner::ParseLayout(a.out);
  EXPECT_EQ(layout.entries.size(), 3u);
  for (const char* bin : {"gateway", "query", "storage"}) EXPECT_NE(layout.Find(bin), nullptr);
  EXPECT_NE(a.err.find("total"), std::string::npos);

  args.push_back("-o");
  args.push_back((dir_.path() / "l.txt").string());
  ASSERT_EQ(Sqlcov(args).code, 0);
  EXPECT_EQ(ReadFile((dir_.path() / "l.txt").string()), a.out);
}

TEST_F(CliTest, PlanningErrorsExitTwo) {
  const auto m = ManifestPaths();
  EXPECT_EQ(Sqlcov({"plan", m[0], m[0]}).code, 2);
  const fs::path bad = dir_.path() / "bad.cfg";
  WriteFile(bad.string(), "binary x\nfunction f entry nope\n");
  CliRun r = Sqlcov({"plan", bad.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.cfg"), std::string::npos) << r.err;

  const fs::path cfg = WriteConfig((testing::kDataDir / "seeds").string());
  WriteFile((dir_.path() / "layout.txt").string(), "not a layout\n");
  EXPECT_EQ(Sqlcov({"fuzz", "-c", cfg.string(), "--dry-run", "-q"}).code, 2);
}

TEST_F(CliTest, BadConfigExitsOne) {
  const fs::path cfg = WriteConfig((testing::kDataDir / "seeds").string(), "colour=blue\n");
  CliRun r = Sqlcov({"fuzz", "-c", cfg.string(), "-q"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("colour"), std::string::npos) << r.err;
}

TEST_F(CliTest, TargetLaunchFailureExitsThree) {
  const fs::path fake = dir_.path() / "fake";
  fs::create_directories(fake);
  for (const char* b : {"toydb_gateway", "toydb_query", "toydb_storage"}) {
    WriteFile((fake / b).string(), "#!/bin/sh\nexit 1\n");
    fs::permissions(fake / b, fs::perms::owner_all);
  }
  const fs::path cfg = WriteConfig((testing::kDataDir / "seeds").string(),
                                   "target_dir=" + fake.string() + "\nmax_restarts=1\n");
  CliRun r = Sqlcov({"fuzz", "-c", cfg.string(), "--dry-run", "-q"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, ShortCampaignWritesStatsAndCoverage) {
  const fs::path cfg =
      WriteConfig((testing::kDataDir / "seeds").string(), "stats_interval_s=1\n");
  CliRun r = Sqlcov({"fuzz", "-c", cfg.string(), "--budget-seconds", "4", "--session", "smoke",
                  "--rng-seed", "3", "-q"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* key : {"session smoke", "executions ", "covered_blocks ", "paths ", "corpus ",
                          "anomalies ", "coverage "})
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  EXPECT_TRUE(fs::exists(dir_.path() / "reports" / "smoke" / fuzz::kCoverageFile));

  auto runs = fuzz::ReadStatsFile(dir_.path() / "stats.csv");
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_GE(runs[0].size(), 3u);
  EXPECT_GT(runs[0].back().executions, 0u);
  EXPECT_GE(runs[0].back().elapsed_seconds, 4.0);

  CliRun s = Sqlcov({"stats", (dir_.path() / "stats.csv").string()});
  ASSERT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("exec/s"), std::string::npos);
}

TEST_F(CliTest, TriageListsBundlesAndReplayReproduces) {
  // Each seed runs on a fresh target, so crashing seeds give one bundle each.
  const fs::path seeds = dir_.path() / "seeds";
  fs::create_directories(seeds);
  WriteFile((seeds / "a.sql").string(), "CALL cancel_backend(0);\n");
  WriteFile((seeds / "b.sql").string(), "SELECT 1, 2 ORDER BY 3;\n");
  WriteFile((seeds / "c.sql").string(), "CREATE TABLE t (a INT); CALL analyze(t);\n");
  WriteFile((seeds / "d.sql").string(), "SELECT 1;\n");
  const fs::path cfg = WriteConfig(seeds.string());
  CliRun f = Sqlcov({"fuzz", "-c", cfg.string(), "--dry-run", "--session", "tri", "-q"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_NE(f.out.find("anomalies 3"), std::string::npos) << f.out;

  CliRun t = Sqlcov({"triage", (dir_.path() / "reports").string()});
  ASSERT_EQ(t.code, 0) << t.err;
  ASSERT_EQ(std::count(t.out.begin(), t.out.end(), '\n'), 4) << t.out;  // header + 3
  const std::string& all = t.out;
  EXPECT_NE(all.find("CancelBackend"), std::string::npos);
  EXPECT_NE(all.find("SIGABRT"), std::string::npos);
  EXPECT_NE(all.find("SIGFPE"), std::string::npos);
  CliRun other = Sqlcov({"triage", (dir_.path() / "reports").string(), "--session", "other"});
  EXPECT_EQ(std::count(other.out.begin(), other.out.end(), '\n'), 1) << other.out;

  fs::path bundle;
  for (const auto& d : fs::directory_iterator(dir_.path() / "reports" / "tri"))
    if (fs::exists(d.path() / "meta.json")) bundle = d.path();
  ASSERT_FALSE(bundle.empty());
  CliRun rep = Sqlcov({"replay", bundle.string(), "-c", cfg.string()});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(rep.out.rfind("reproduced", 0), 0u) << rep.out;
  CliRun rep2 = Sqlcov({"replay", bundle.string(), "--target-dir", testing::kTargetDir.string(),
                     "--layout", (dir_.path() / "layout.txt").string()});
  EXPECT_EQ(rep2.code, 0) << rep2.err;
  EXPECT_EQ(Sqlcov({"replay", bundle.string()}).code, 1);

  // A damaged bundle is reported, not replayed.
  fs::remove(bundle / "meta.json");
  EXPECT_EQ(Sqlcov({"replay", bundle.string(), "-c", cfg.string()}).code, 1);
  EXPECT_EQ(Sqlcov({"triage", (dir_.path() / "reports").string()}).code, 1);
}

}  // namespace
}  // namespace sqlcov
