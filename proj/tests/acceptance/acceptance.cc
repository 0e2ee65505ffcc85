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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any selected criterion fails.
//
//   acceptance [--only N ...] [--workdir DIR] [--ablation-seconds S]
//              [--ablation-pairs P] [--discovery-seconds S]
//
// Defaults are the pinned settings; the flags exist to shorten development
// runs.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fcntl.h>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqlcov/common/rng.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/coverage/novelty.h"
#include "sqlcov/coverage/region.h"
#include "sqlcov/fuzz/loop.h"
#include "sqlcov/fuzz/target.h"
#include "sqlcov/planner/cfg.h"
#include "sqlcov/planner/counters.h"
#include "sqlcov/planner/layout.h"
#include "sqlcov/sql/generator.h"
#include "sqlcov/sql/lexer.h"
#include "sqlcov/sql/parser.h"
#include "sqlcov/triage/bundle.h"
#include "sqlcov/triage/registry.h"
#include "support/cfg_oracle.h"
#include "support/toy_env.h"

namespace sqlcov::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Options {
  fs::path workdir;
  double ablation_seconds = 600;
  int ablation_pairs = 10;
  double discovery_seconds = 600;
  uint64_t discovery_executions = 200000;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// --- running the CLI ---

struct Child {
  pid_t pid = -1;
  fs::path out;
};

Child SpawnCli(const std::vector<std::string>& args, const fs::path& out,
               const std::map<std::string, std::string>& env = {}) {
  std::vector<std::string> argv_s{SQLCOV_CLI};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  pid_t pid = fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    int fd = open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, 1);
      dup2(fd, 2);
    }
    for (const auto& [k, v] : env) setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> argv;
    for (auto& s : argv_s) argv.push_back(s.data());
    argv.push_back(nullptr);
    execv(argv[0], argv.data());
    _exit(127);
  }
  return {pid, out};
}

int WaitCli(const Child& c) {
  int status = 0;
  while (waitpid(c.pid, &status, 0) < 0 && errno == EINTR) {
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

// Value of a `key value` line in the CLI's summary output.
std::string SummaryValue(const std::string& output, const std::string& key) {
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return std::string(Trim(line.substr(key.size() + 1)));
  return "";
}

// A campaign config over the shipped seeds and the built toy target.
fs::path WriteCampaignConfig(const fs::path& dir, const std::string& extra = "") {
  fs::create_directories(dir);
  WriteFile((dir / "layout.txt").string(), planner::FormatLayout(testing::ToyPlan().layout));
  const fs::path cfg = dir / "campaign.cfg";
  WriteFile(cfg.string(), "config_version=1\n"
                          "seed_dir=" + (testing::kDataDir / "seeds").string() + "\n"
                          "dictionary=" + (testing::kDataDir / "sql.dict").string() + "\n"
                          "layout=layout.txt\n"
                          "target_dir=" + testing::kTargetDir.string() + "\n"
                          "reports_dir=reports\n"
                          "stats=stats.csv\n" + extra);
  return cfg;
}

std::vector<fs::path> BundleDirs(const fs::path& session_dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(session_dir)) return out;
  for (const auto& e : fs::directory_iterator(session_dir))
    if (e.is_directory()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Bundles gathered by criteria 6 and 7 for criterion 8.
std::vector<fs::path> g_bundles;

// --- 1 ---

Outcome CollisionLoad(const Options&) {
  const double load = planner::EstimateCollisionLoad(466 * 1024, 256 * 1024);
  const double expected = 466.0 / 256.0;  // blocks per counter when spread evenly
  Outcome o;
  o.pass = std::fabs(load - 1.82) <= 0.005 && std::fabs(load - expected) < 1e-12;
  o.detail = Format("load %.7f (target 1.82 +/- 0.005)", load);
  return o;
}

// --- 2 ---

Outcome BijectiveMapping(const Options&) {
  Rng rng(20260201);
  size_t failures = 0, max_blocks = 0, total_blocks = 0;
  for (int i = 0; i < 1000; ++i) {
    planner::BinaryManifest m{"bin" + std::to_string(i), {}};
    const size_t budget = 1 + Below(rng, 500);
    size_t blocks = 0;
    for (int f = 0; blocks < budget; ++f) {
      auto cfg = testing::RandomCfg(rng, static_cast<uint32_t>(std::min<size_t>(40, budget - blocks)),
                                    "f" + std::to_string(f));
      blocks += cfg.blocks.size();
      m.functions.push_back(std::move(cfg));
    }
    const auto split = planner::SplitCriticalEdges(m);
    const auto a = planner::AssignCounters(split);
    size_t split_blocks = 0;
    for (const auto& f : split.functions) split_blocks += f.blocks.size();
    max_blocks = std::max(max_blocks, blocks);
    total_blocks += split_blocks;

    // Every split block has exactly one counter, every counter in
    // [0, total) has exactly one block.
    std::vector<int> hits(a.total_counters, 0);
    bool ok = a.total_counters == split_blocks && a.mapping.size() == split_blocks;
    for (size_t f = 0; ok && f < split.functions.size(); ++f) {
      for (uint32_t b = 0; b < split.functions[f].blocks.size(); ++b) {
        auto c = a.CounterOf(split.Block(f, b));
        if (!c || *c >= a.total_counters) {
          ok = false;
          break;
        }
        ++hits[*c];
      }
    }
    for (int h : hits) ok = ok && h == 1;
    if (!ok) ++failures;
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = Format("1000 manifests (largest %zu blocks, %zu split blocks total), %zu not bijective",
                    max_blocks, total_blocks, failures);
  return o;
}

// --- 3 ---

struct WalkAudit {
  size_t walks = 0;
  size_t set_violations = 0;    // covered block set does not fix covered critical edges
  size_t count_violations = 0;  // block counts do not fix critical edge counts
  size_t dummy_mismatch = 0;    // dummy covered != its edge traversed
};

// Enumerates every walk from the entry that uses each edge at most twice
// (every prefix counts: executions may stop anywhere) and checks that the
// split graph's block coverage determines the original critical edges
// traversed.
WalkAudit AuditWalks(const planner::FunctionCfg& original, const planner::FunctionCfg& split,
                     size_t cap) {
  const auto critical = testing::BruteForceCriticalEdges(original);
  std::map<std::string, uint32_t> original_index;
  for (uint32_t i = 0; i < original.blocks.size(); ++i) original_index[original.blocks[i]] = i;
  std::map<uint32_t, std::pair<uint32_t, uint32_t>> dummy_edge;
  for (const auto& [u, v] : critical) {
    int64_t d = split.Find(planner::DummyBlockName(original.blocks[u], original.blocks[v]));
    if (d >= 0) dummy_edge[static_cast<uint32_t>(d)] = {u, v};
  }

  const size_t n = split.blocks.size();
  std::vector<std::vector<uint32_t>> succ(n);
  for (const auto& e : split.edges) succ[e.src].push_back(e.dst);
  std::map<std::pair<uint32_t, uint32_t>, int> edge_use;
  std::map<std::vector<bool>, std::set<std::pair<uint32_t, uint32_t>>> by_set;
  std::map<std::vector<uint32_t>, std::map<std::pair<uint32_t, uint32_t>, int>> by_count;
  std::vector<uint32_t> walk{split.entry};
  WalkAudit audit;

  auto check = [&] {
    // Control never stops on a split block: it stands for an edge.
    if (split.blocks[walk.back()].find(planner::kDummyMarker) != std::string::npos) return;
    ++audit.walks;
    std::vector<bool> covered(n, false);
    std::vector<uint32_t> counts(n, 0);
    for (uint32_t b : walk) {
      covered[b] = true;
      ++counts[b];
    }
    std::vector<uint32_t> projected;
    for (uint32_t b : walk) {
      auto it = original_index.find(split.blocks[b]);
      if (it != original_index.end()) projected.push_back(it->second);
    }
    std::map<std::pair<uint32_t, uint32_t>, int> crit_count;
    std::set<std::pair<uint32_t, uint32_t>> crit_set;
    for (size_t i = 0; i + 1 < projected.size(); ++i) {
      std::pair<uint32_t, uint32_t> e{projected[i], projected[i + 1]};
      if (critical.count(e)) {
        ++crit_count[e];
        crit_set.insert(e);
      }
    }
    for (const auto& [d, e] : dummy_edge)
      if (covered[d] != (crit_set.count(e) > 0)) ++audit.dummy_mismatch;
    auto [s, s_new] = by_set.emplace(covered, crit_set);
    if (!s_new && s->second != crit_set) ++audit.set_violations;
    auto [c, c_new] = by_count.emplace(counts, crit_count);
    if (!c_new && c->second != crit_count) ++audit.count_violations;
  };

  auto dfs = [&](auto&& self, uint32_t u) -> void {
    if (audit.walks >= cap) return;
    check();
    for (uint32_t v : succ[u]) {
      int& used = edge_use[{u, v}];
      if (used >= 2) continue;
      ++used;
      walk.push_back(v);
      self(self, v);
      walk.pop_back();
      --used;
    }
  };
  dfs(dfs, split.entry);
  return audit;
}

Outcome CriticalEdgeOracle(const Options&) {
  Rng rng(1212);
  size_t cfgs = 0, with_critical = 0, residual = 0, walks = 0, capped = 0, control = 0;
  WalkAudit total;
  constexpr size_t kCap = 200000;
  for (int i = 0; i < 2000; ++i) {
    auto cfg = testing::RandomCfg(rng, 12);
    ++cfgs;
    const auto crit = testing::BruteForceCriticalEdges(cfg);
    if (!crit.empty()) ++with_critical;
    const auto split = planner::SplitCriticalEdges(cfg);
    residual += testing::BruteForceCriticalEdges(split).size();
    auto a = AuditWalks(cfg, split, kCap);
    walks += a.walks;
    if (a.walks >= kCap) ++capped;
    total.set_violations += a.set_violations;
    total.count_violations += a.count_violations;
    total.dummy_mismatch += a.dummy_mismatch;
    // Control: without the split, block coverage is ambiguous somewhere.
    auto unsplit = AuditWalks(cfg, cfg, kCap);
    control += unsplit.set_violations + unsplit.count_violations;
  }
  Outcome o;
  o.pass = residual == 0 && total.set_violations == 0 && total.count_violations == 0 &&
           total.dummy_mismatch == 0 && with_critical > 0 && control > 0;
  o.detail = Format(
      "%zu cfgs (%zu with critical edges), %zu walks (%zu cfgs hit the %zu-walk cap); "
      "residual critical edges %zu, set violations %zu, count violations %zu, dummy mismatches %zu "
      "(unsplit control: %zu violations)",
      cfgs, with_critical, walks, capped, kCap, residual, total.set_violations,
      total.count_violations, total.dummy_mismatch, control);
  return o;
}

// --- 4 ---

Outcome Isolation(const Options&) {
  const auto plan = testing::ToyPlan();
  std::vector<std::string> problems;

  // Targeted writes: each binary, in its own process, hammers every counter
  // of its own window; nothing else may change.
  {
    auto region = coverage::CoverageRegion::Create(plan.layout);
    std::vector<pid_t> kids;
    for (const auto& entry : plan.layout.entries) {
      pid_t pid = fork();
      if (pid == 0) {
        try {
          auto mine = coverage::CoverageRegion::Open(region.name());
          auto view = mine.Attach(entry.binary_id);
          for (int round = 0; round < 300; ++round)
            for (uint32_t i = 0; i < view.length; ++i) coverage::RecordHit(view, i);
          _exit(0);
        } catch (...) {
          _exit(1);
        }
      }
      kids.push_back(pid);
    }
    for (pid_t k : kids) {
      int status = 0;
      waitpid(k, &status, 0);
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) problems.push_back("writer failed");
    }
    auto snap = region.Snapshot();
    for (uint32_t i = 0; i < snap.size(); ++i)
      if (snap.counters[i] != 255) problems.push_back(Format("counter %u = %u", i, snap.counters[i]));
    // One writer at a time: only its window moves.
    for (const auto& entry : plan.layout.entries) {
      region.Reset();
      pid_t pid = fork();
      if (pid == 0) {
        auto mine = coverage::CoverageRegion::Open(region.name());
        auto view = mine.Attach(entry.binary_id);
        for (uint32_t i = 0; i < view.length; ++i) coverage::RecordHit(view, i);
        _exit(0);
      }
      waitpid(pid, nullptr, 0);
      auto s = region.Snapshot();
      for (uint32_t i = 0; i < s.size(); ++i) {
        const bool inside = i >= entry.offset && i < entry.offset + entry.length;
        if (s.counters[i] != (inside ? 1 : 0))
          problems.push_back(entry.binary_id + Format(" wrote counter %u", i));
      }
    }
  }

  // The toy target: every nonzero counter must be explained by a block the
  // owning binary actually executed.
  size_t windows_touched = 0;
  {
    testing::TempDir dir("accept-iso");
    const fs::path trace = dir.path() / "trace.txt";
    testing::TraceOracle oracle(plan);
    fuzz::TargetSession target(testing::ToyTargetOptions("iso", {{"TOYDB_TRACE", trace.string()}}));
    target.Start();
    fs::resize_file(trace, 0);
    auto r = target.Evaluate({"CREATE TABLE iso (a INT, b TEXT)",
                              "INSERT INTO iso VALUES (1, 'x'), (2, 'y')",
                              "SELECT b, count(*) FROM iso WHERE a > 0 GROUP BY b ORDER BY b"});
    if (r.status != fuzz::ExecutionStatus::kOk) problems.push_back("toy query did not succeed");
    auto replay = oracle.Replay(ReadFile(trace.string()));
    for (const auto& e : replay.errors) problems.push_back("trace: " + e);
    auto covered = r.snapshot.CoveredIndices();
    std::set<uint32_t> got(covered.begin(), covered.end());
    if (got != replay.covered)
      problems.push_back(Format("region has %zu covered, trace explains %zu", got.size(),
                                replay.covered.size()));
    for (const auto& entry : plan.layout.entries) {
      bool any = false;
      for (uint32_t i = entry.offset; i < entry.offset + entry.length; ++i) any |= got.count(i) > 0;
      windows_touched += any;
    }
  }
  Outcome o;
  o.pass = problems.empty() && windows_touched >= 2;
  o.detail = Format("toy query touched %zu of %zu windows; %zu contamination problems",
                    windows_touched, plan.layout.entries.size(), problems.size());
  if (!problems.empty()) o.detail += " (first: " + problems.front() + ")";
  return o;
}

// --- 5 ---

Outcome GuidanceAblation(const Options& opt) {
  const fs::path dir = opt.workdir / "ablation";
  const fs::path cfg = WriteCampaignConfig(dir);
  const std::string seconds = Format("%g", opt.ablation_seconds);
  int ge = 0, gt = 0;
  std::string per_pair;
  std::vector<std::string> errors;
  for (int p = 0; p < opt.ablation_pairs; ++p) {
    // Both arms run side by side so they see the same machine load.
    std::vector<Child> arms;
    for (int guided = 1; guided >= 0; --guided) {
      const std::string tag = Format("pair%d-%s", p, guided ? "guided" : "blind");
      std::vector<std::string> args = {"fuzz", "-c", cfg.string(), "--budget-seconds", seconds,
                                       "--session", tag, "--rng-seed", std::to_string(7000 + p),
                                       "--stats", (dir / (tag + ".csv")).string(), "-q"};
      if (!guided) args.push_back("--no-feedback");
      arms.push_back(SpawnCli(args, dir / (tag + ".out")));
    }
    long blocks[2] = {-1, -1};
    for (int a = 0; a < 2; ++a) {
      int rc = WaitCli(arms[a]);
      std::string out = ReadFile(arms[a].out.string());
      if (rc != 0) errors.push_back(Format("pair %d arm %d exit %d", p, a, rc));
      std::string v = SummaryValue(out, "covered_blocks");
      if (!v.empty()) blocks[a] = std::stol(v);
    }
    ge += blocks[0] >= blocks[1];
    gt += blocks[0] > blocks[1];
    per_pair += Format("%s%ld/%ld", p ? " " : "", blocks[0], blocks[1]);
    std::fprintf(stderr, "  ablation pair %d: guided %ld, blackbox %ld\n", p, blocks[0], blocks[1]);
  }
  const int n = opt.ablation_pairs;
  const int need_ge = static_cast<int>(std::ceil(0.8 * n)), need_gt = static_cast<int>(std::ceil(0.6 * n));
  Outcome o;
  o.pass = errors.empty() && ge >= need_ge && gt >= need_gt;
  o.detail = Format("%d pairs x %gs: guided >= blackbox in %d (need %d), > in %d (need %d); ", n,
                    opt.ablation_seconds, ge, need_ge, gt, need_gt) +
             "guided/blackbox blocks " + per_pair;
  if (!errors.empty()) o.detail += "; " + errors.front();
  return o;
}

// --- 6 ---

struct PlantedBug {
  int number;
  std::string binary;
  int signal;
  std::string frame;
};

const std::vector<PlantedBug>& PlantedBugs() {
  static const std::vector<PlantedBug> bugs = {
      {1, "gateway", SIGSEGV, "CancelBackend"},
      {2, "query", SIGABRT, "AnalyzeSelect"},
      {3, "storage", SIGSEGV, "BackfillColumn"},
      {4, "storage", SIGSEGV, "ExecUpdate"},  // needs a renamed table with rows
      {5, "query", SIGFPE, "AverageRowWidth"},
  };
  return bugs;
}

int MatchBug(const triage::Bundle& b) {
  if (b.kind != "crash") return 0;
  for (const auto& bug : PlantedBugs()) {
    if (b.binary_id != bug.binary || b.signal != bug.signal) continue;
    for (const auto& f : b.stack)
      if (f.find(bug.frame) != std::string::npos) return bug.number;
  }
  return -1;
}

Outcome PlantedBugDiscovery(const Options& opt) {
  const fs::path dir = opt.workdir / "discovery";
  const fs::path cfg = WriteCampaignConfig(dir);
  Child c = SpawnCli({"fuzz", "-c", cfg.string(), "--session", "discovery", "--rng-seed", "1",
                      "--budget-seconds", Format("%g", opt.discovery_seconds),
                      "--budget-executions", std::to_string(opt.discovery_executions), "-q"},
                     dir / "fuzz.out");
  const int rc = WaitCli(c);
  const std::string out = ReadFile(c.out.string());
  std::map<int, int> bundles_per_bug;
  int timeouts = 0, unexpected = 0, unreadable = 0;
  for (const auto& b : BundleDirs(dir / "reports" / "discovery")) {
    g_bundles.push_back(b);
    try {
      auto bundle = triage::ReadBundle(b);
      if (bundle.kind == "timeout") {
        ++timeouts;
        continue;
      }
      int bug = MatchBug(bundle);
      if (bug > 0)
        ++bundles_per_bug[bug];
      else
        ++unexpected;
    } catch (const Error&) {
      ++unreadable;
    }
  }
  int found = 0;
  bool one_each = true;
  std::string list;
  for (const auto& [bug, n] : bundles_per_bug) {
    ++found;
    one_each = one_each && n == 1;
    list += Format("%s#%d:%d", list.empty() ? "" : " ", bug, n);
  }
  Outcome o;
  o.pass = rc == 0 && found >= 4 && bundles_per_bug.count(4) && one_each && unreadable == 0;
  o.detail = Format("exit %d, %s executions in %s; %d/5 planted bugs found (bundles per bug: ", rc,
                    SummaryValue(out, "executions").c_str(),
                    Format("<= %gs", opt.discovery_seconds).c_str(), found) +
             list + Format("), state-dependent bug %s, %d timeout bundles, %d other crash bundles",
                           bundles_per_bug.count(4) ? "found" : "missed", timeouts, unexpected);
  return o;
}

// --- 7 ---

Outcome DedupIdempotence(const Options& opt) {
  const auto plan = testing::ToyPlan();
  std::vector<std::string> problems;
  size_t written = 0, suppressed = 0;
  uint64_t count = 0;

  fuzz::TargetSession target(testing::ToyTargetOptions("dedup"));
  target.Start();
  auto crash_event = [&](const std::vector<std::string>& input) {
    auto r = target.Evaluate(input);
    if (r.status != fuzz::ExecutionStatus::kCrash || r.anomalies.empty())
      throw Error("input did not crash: " + input.back());
    return r.anomalies.front();
  };

  {
    const fs::path reports = opt.workdir / "dedup-one";
    triage::Triager triager(reports, "one");
    coverage::CumulativeTable cumulative(plan.layout.total_length);
    size_t news = 0, dups = 0;
    for (int i = 0; i < 100; ++i) {
      auto event = crash_event({"SELECT 1, 2 ORDER BY 3"});
      auto outcome = triager.Triage(event, cumulative);
      if (outcome.verdict == triage::Verdict::kNew) {
        ++news;
        if (i != 0) problems.push_back(Format("replay %d was new", i));
        g_bundles.push_back(outcome.bundle);
      } else {
        ++dups;
      }
      count = outcome.count;
    }
    written = triager.bundles_written();
    suppressed = triager.dumps_suppressed();
    if (news != 1 || dups != 99 || count != 100 || written != 1 || suppressed != 99)
      problems.push_back(Format("new %zu dup %zu count %lu", news, dups,
                                static_cast<unsigned long>(count)));
    if (BundleDirs(reports / "one").size() != 1) problems.push_back("bundle directories != 1");
  }

  size_t distinct_bundles = 0;
  {
    // Three bugs, interleaved with repeats: each first occurrence must get
    // a bundle with its dump, repeats must not.
    const fs::path reports = opt.workdir / "dedup-three";
    triage::Triager triager(reports, "three");
    coverage::CumulativeTable cumulative(plan.layout.total_length);
    const std::vector<std::vector<std::string>> inputs = {
        {"CALL cancel_backend(0)"},
        {"SELECT 1, 2 ORDER BY 3"},
        {"CREATE TABLE e (a INT)", "CALL analyze(e)"}};
    Rng rng(77);
    std::set<size_t> seen;
    for (int i = 0; i < 30; ++i) {
      size_t which = Below(rng, inputs.size());
      auto outcome = triager.Triage(crash_event(inputs[which]), cumulative);
      const bool first = seen.insert(which).second;
      if (first != (outcome.verdict == triage::Verdict::kNew))
        problems.push_back(Format("input %zu occurrence %d: wrong verdict", which, i));
      if (first) {
        if (!fs::exists(outcome.bundle / "dump.bin"))
          problems.push_back("first occurrence lost its dump");
        g_bundles.push_back(outcome.bundle);
      }
    }
    distinct_bundles = BundleDirs(reports / "three").size();
    if (seen.size() != 3 || distinct_bundles != 3)
      problems.push_back(Format("%zu distinct inputs, %zu bundles", seen.size(), distinct_bundles));
  }
  Outcome o;
  o.pass = problems.empty();
  o.detail = Format("100 replays: %zu bundle, %zu suppressed, registry count %lu; "
                    "3 bugs: %zu bundles",
                    written, suppressed, static_cast<unsigned long>(count), distinct_bundles);
  if (!problems.empty()) o.detail += "; " + problems.front();
  return o;
}

// --- 8 ---

Outcome BundleCompleteness(const Options& opt) {
  if (g_bundles.empty()) {
    // Run alone: make one bundle per stateless planted bug.
    triage::Triager triager(opt.workdir / "completeness", "c");
    coverage::CumulativeTable cumulative(testing::ToyPlan().layout.total_length);
    fuzz::TargetSession target(testing::ToyTargetOptions("complete"));
    target.Start();
    for (const auto& input : std::vector<std::vector<std::string>>{
             {"CALL cancel_backend(0)"},
             {"SELECT 1, 2 ORDER BY 3"},
             {"CREATE TABLE e (a INT)", "CALL analyze(e)"}}) {
      for (const auto& event : target.Evaluate(input).anomalies)
        g_bundles.push_back(triager.Triage(event, cumulative).bundle);
    }
  }
  std::set<std::string> expected{triage::kBundleMeta};
  for (const char* f : triage::kBundleFiles) expected.insert(f);
  size_t checked = 0, bad = 0;
  uintmax_t largest_dump = 0;
  std::string first_problem;
  for (const auto& dir : g_bundles) {
    ++checked;
    std::vector<std::string> why;
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
    if (names != expected) why.push_back("unexpected file set");
    try {
      auto b = triage::ReadBundle(dir);
      if (b.input.empty()) why.push_back("empty input");
      if (b.kind == "crash" && b.stack.empty()) why.push_back("empty stack");
      if (b.coverage.size() != testing::ToyPlan().layout.total_length)
        why.push_back("coverage size");
      std::set<triage::DumpRecordType> types;
      for (const auto& r : b.dump) types.insert(r.type);
      if (types.size() != 5) why.push_back("dump record types");
    } catch (const Error& e) {
      why.push_back(e.what());
    }
    const uintmax_t dump = fs::exists(dir / "dump.bin") ? fs::file_size(dir / "dump.bin") : 0;
    largest_dump = std::max(largest_dump, dump);
    if (dump > triage::kMaxDumpBytes) why.push_back("dump over 1 MiB");
    if (!why.empty()) {
      ++bad;
      if (first_problem.empty()) first_problem = dir.filename().string() + ": " + why.front();
    }
  }
  Outcome o;
  o.pass = checked > 0 && bad == 0;
  o.detail = Format("%zu bundles checked, %zu incomplete, largest dump %ju bytes (limit %zu)",
                    checked, bad, largest_dump, triage::kMaxDumpBytes);
  if (!first_problem.empty()) o.detail += "; " + first_problem;
  return o;
}

// --- 9 ---

bool StrictlyParses(const std::vector<std::string>& statements) {
  try {
    sql::ParseStrict(sql::JoinStatements(statements));
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

Outcome GeneratorRobustness(const Options&) {
  const auto seeds = sql::LoadSeedCorpus(testing::kDataDir / "seeds");
  const auto dict = sql::LoadDictionary(testing::kDataDir / "sql.dict");
  sql::FragmentPool pool;
  for (const auto& s : seeds) pool.InsertAll(sql::HarvestStatements(s.statements));
  sql::MutationOptions mutation;
  mutation.function_names.assign(dict.function_names.begin(), dict.function_names.end());

  Rng rng(99);
  size_t failures = 0, generated[2] = {0, 0}, valid[2] = {0, 0}, fell_back = 0;
  for (int i = 0; i < 10000; ++i) {
    const int arm = i % 2;  // 0: ast mutation, 1: dictionary mutation
    const auto& parent = seeds[Below(rng, seeds.size())];
    sql::GeneratorInputs in;
    in.parent_id = 1;
    in.parent = &parent.statements;
    in.mix = arm == 0 ? sql::StrategyMix{1.0, 0.0} : sql::StrategyMix{0.0, 1.0};
    in.pool = &pool;
    in.dictionary = &dict;
    in.mutation = mutation;
    try {
      sql::TestCase tc = sql::Generate(in, rng);
      if (tc.statements.empty()) {
        ++failures;
        continue;
      }
      fell_back += tc.provenance.fell_back;
      ++generated[arm];
      valid[arm] += StrictlyParses(tc.statements);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  size_t round_trip_failures = 0;
  for (const auto& s : seeds) {
    try {
      auto ast = sql::ParseStrict(sql::JoinStatements(s.statements));
      const std::string text = sql::Serialize(ast);
      auto again = sql::ParseStrict(text);
      if (!sql::StructurallyEqual(ast.root, again.root) || sql::Serialize(again) != text)
        ++round_trip_failures;
    } catch (const ParseError&) {
      ++round_trip_failures;
    }
  }
  const double ast_rate = generated[0] ? static_cast<double>(valid[0]) / generated[0] : 0;
  const double dict_rate = generated[1] ? static_cast<double>(valid[1]) / generated[1] : 0;
  Outcome o;
  o.pass = failures == 0 && ast_rate >= 2 * dict_rate && round_trip_failures == 0;
  o.detail = Format("10000 generations, %zu failures; strict-parse validity ast %.3f vs "
                    "dictionary %.3f (ratio %.2f, need 2.00; %zu ast fallbacks); "
                    "round trip %zu/%zu seeds ok",
                    failures, ast_rate, dict_rate, dict_rate > 0 ? ast_rate / dict_rate : INFINITY,
                    fell_back, seeds.size() - round_trip_failures, seeds.size());
  return o;
}

// --- 10 ---

Outcome DryRunAccounting(const Options& opt) {
  const fs::path dir = opt.workdir / "dryrun";
  const fs::path cfg = WriteCampaignConfig(dir);
  Child c = SpawnCli({"fuzz", "-c", cfg.string(), "--dry-run", "--session", "dry", "-q"},
                     dir / "fuzz.out");
  const int rc = WaitCli(c);
  const std::string out = ReadFile(c.out.string());
  std::set<uint32_t> cli;
  try {
    auto snap = coverage::ReadSnapshotFile((dir / "reports" / "dry" / fuzz::kCoverageFile).string());
    for (uint32_t i : snap.CoveredIndices()) cli.insert(i);
  } catch (const Error&) {
  }

  // Oracle: each seed alone on a fresh target, coverage read from the
  // execution trace rather than the counters.
  const auto plan = testing::ToyPlan();
  testing::TraceOracle oracle(plan);
  const fs::path trace = dir / "trace.txt";
  std::set<uint32_t> expected;
  size_t trace_errors = 0, seeds_run = 0;
  for (const auto& seed : sql::LoadSeedCorpus(testing::kDataDir / "seeds")) {
    fuzz::TargetSession target(
        testing::ToyTargetOptions("dry", {{"TOYDB_TRACE", trace.string()}}));
    WriteFile(trace.string(), "");
    target.Start();
    fs::resize_file(trace, 0);  // startup work is not part of any statement
    target.Evaluate(seed.statements);
    target.Stop();
    auto r = oracle.Replay(ReadFile(trace.string()));
    trace_errors += r.errors.size();
    expected.insert(r.covered.begin(), r.covered.end());
    ++seeds_run;
  }
  std::vector<uint32_t> only_cli, only_oracle;
  std::set_difference(cli.begin(), cli.end(), expected.begin(), expected.end(),
                      std::back_inserter(only_cli));
  std::set_difference(expected.begin(), expected.end(), cli.begin(), cli.end(),
                      std::back_inserter(only_oracle));
  const std::string reported = SummaryValue(out, "covered_blocks");
  Outcome o;
  o.pass = rc == 0 && trace_errors == 0 && !cli.empty() && only_cli.empty() &&
           only_oracle.empty() && reported == std::to_string(cli.size());
  o.detail = Format("%zu seeds; dry run covered %zu (reported %s), oracle %zu; "
                    "only in dry run %zu, only in oracle %zu, trace errors %zu",
                    seeds_run, cli.size(), reported.c_str(), expected.size(), only_cli.size(),
                    only_oracle.size(), trace_errors);
  return o;
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome(const Options&)> run;
};

}  // namespace
}  // namespace sqlcov::acceptance

int main(int argc, char** argv) {
  using namespace sqlcov::acceptance;
  namespace fs = std::filesystem;
  Options opt;
  std::vector<int> only;
  std::string workdir;
  CLI::App app{"sqlcov acceptance checks"};
  app.add_option("--only", only, "Criteria to run (default all)")->check(CLI::Range(1, 10));
  app.add_option("--workdir", workdir, "Scratch directory, kept afterwards (default: temp dir)");
  app.add_option("--ablation-seconds", opt.ablation_seconds)->check(CLI::PositiveNumber);
  app.add_option("--ablation-pairs", opt.ablation_pairs)->check(CLI::Range(1, 100));
  app.add_option("--discovery-seconds", opt.discovery_seconds)->check(CLI::PositiveNumber);
  app.add_option("--discovery-executions", opt.discovery_executions);
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<sqlcov::testing::TempDir> scratch;
  if (workdir.empty()) {
    scratch = std::make_unique<sqlcov::testing::TempDir>("acceptance");
    opt.workdir = scratch->path();
  } else {
    opt.workdir = workdir;
    fs::remove_all(opt.workdir);
    fs::create_directories(opt.workdir);
  }

  const std::vector<Criterion> criteria = {
      {1, "collision load", CollisionLoad},
      {2, "bijective counter mapping", BijectiveMapping},
      {3, "critical-edge oracle", CriticalEdgeOracle},
      {4, "inter-binary isolation", Isolation},
      {5, "guidance ablation", GuidanceAblation},
      {6, "planted-bug discovery", PlantedBugDiscovery},
      {7, "dedup idempotence", DedupIdempotence},
      {8, "bundle completeness", BundleCompleteness},
      {9, "generator robustness", GeneratorRobustness},
      {10, "dry-run accounting", DryRunAccounting},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run(opt);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("criterion %2d %s  %s (%.1fs): %s\n", c.number, o.pass ? "PASS" : "FAIL", c.name,
                secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
