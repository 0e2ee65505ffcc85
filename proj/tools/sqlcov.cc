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

// sqlcov: plan coverage layouts, run fuzzing campaigns against the toy
// target, inspect triage bundles, replay them and summarize stats.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqlcov/common/strings.h"
#include "sqlcov/coverage/region.h"
#include "sqlcov/fuzz/config.h"
#include "sqlcov/fuzz/loop.h"
#include "sqlcov/fuzz/replay.h"
#include "sqlcov/planner/counters.h"
#include "sqlcov/planner/layout.h"
#include "sqlcov/planner/manifest.h"
#include "sqlcov/toydb/wire.h"
#include "sqlcov/triage/bundle.h"
#include "sqlcov/triage/registry.h"
#include "sqlcov/triage/supervisor.h"

namespace fs = std::filesystem;

namespace sqlcov {
namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kPlanningError = 2,
  kTargetFailure = 3,
};

int Fail(int code, const std::string& message) {
  std::cerr << "sqlcov: " << message << "\n";
  return code;
}

// --- plan ---

struct PlanArgs {
  std::vector<std::string> manifests;
  std::string output;
};

int CmdPlan(const PlanArgs& args) {
  std::vector<planner::BinaryManifest> manifests;
  try {
    for (const auto& path : args.manifests) {
      if (!fs::is_regular_file(path)) return Fail(kUsage, "no such manifest: " + path);
      try {
        for (auto& m : planner::ParseManifestSet(ReadFile(path)))
          manifests.push_back(std::move(m));
      } catch (const ParseError& e) {
        return Fail(kPlanningError, path + ": " + e.what());
      }
    }
    planner::Plan plan = planner::BuildPlan(manifests);
    const std::string text = planner::FormatLayout(plan.layout);
    if (args.output.empty() || args.output == "-") {
      std::cout << text;
    } else {
      WriteFile(args.output, text);
    }
    for (size_t i = 0; i < plan.split.size(); ++i) {
      const auto& a = plan.assignments[i];
      const auto* window = plan.layout.Find(a.binary_id);
      std::cerr << a.binary_id << ": " << manifests[i].block_count() << " blocks, "
                << a.total_counters << " counters (" << a.total_counters -
                       manifests[i].block_count()
                << " split dummies), window " << window->offset << "+" << window->length
                << "\n";
    }
    std::cerr << "total " << plan.layout.total_length << " counters\n";
  } catch (const Error& e) {
    return Fail(kPlanningError, e.what());
  }
  return kOk;
}

// --- fuzz ---

struct FuzzArgs {
  std::string config;
  bool dry_run = false;
  bool no_feedback = false;
  std::optional<double> budget_seconds;
  std::optional<uint64_t> budget_executions;
  std::string session;
  std::optional<uint64_t> rng_seed;
  std::string stats;
  bool quiet = false;
};

int CmdFuzz(const FuzzArgs& args) {
  fuzz::FuzzConfig config;
  try {
    config = fuzz::LoadConfig(args.config);
  } catch (const Error& e) {
    return Fail(kUsage, args.config + ": " + e.what());
  }
  if (args.dry_run) config.dry_run = true;
  if (args.no_feedback) config.feedback = false;
  if (args.budget_seconds) config.budget_seconds = *args.budget_seconds;
  if (args.budget_executions) config.budget_executions = *args.budget_executions;
  if (!args.session.empty()) config.session = args.session;
  if (args.rng_seed) config.rng_seed = *args.rng_seed;
  if (!args.stats.empty()) config.stats = args.stats;

  std::ostream* log = args.quiet ? nullptr : &std::cerr;
  try {
    fuzz::FuzzLoop loop(config, log);
    fuzz::FuzzStats stats = loop.Run();
    std::cout << "session " << loop.session() << "\n"
              << "executions " << stats.executions << "\n"
              << "covered_blocks " << stats.covered_blocks << "\n"
              << "paths " << stats.paths << "\n"
              << "corpus " << stats.corpus << "\n"
              << "anomalies " << stats.anomalies << "\n"
              << "coverage " << (loop.session_dir() / fuzz::kCoverageFile).string() << "\n";
  } catch (const fuzz::ConfigError& e) {
    return Fail(kUsage, e.what());
  } catch (const fuzz::TargetError& e) {
    return Fail(kTargetFailure, e.what());
  } catch (const triage::LaunchError& e) {
    return Fail(kTargetFailure, e.what());
  } catch (const coverage::RegionError& e) {
    return Fail(kTargetFailure, e.what());
  } catch (const toydb::WireError& e) {
    return Fail(kTargetFailure, e.what());
  } catch (const planner::PlanError& e) {
    return Fail(kPlanningError, e.what());
  } catch (const ParseError& e) {
    return Fail(kPlanningError, config.layout.string() + ": " + e.what());
  } catch (const Error& e) {
    return Fail(kUsage, e.what());
  }
  return kOk;
}

// --- triage ---

int CmdTriage(const std::string& reports, const std::string& session) {
  if (!fs::is_directory(reports)) return Fail(kUsage, "not a directory: " + reports);
  triage::Registry registry;
  try {
    registry = triage::Registry::Load(fs::path(reports) / "registry.txt");
  } catch (const Error& e) {
    return Fail(kUsage, e.what());
  }
  std::vector<fs::path> dirs;
  for (const auto& s : fs::directory_iterator(reports)) {
    if (!s.is_directory()) continue;
    if (!session.empty() && s.path().filename() != session) continue;
    for (const auto& b : fs::directory_iterator(s.path()))
      if (b.is_directory()) dirs.push_back(b.path());
  }
  std::sort(dirs.begin(), dirs.end());
  int status = kOk;
  std::printf("%-32s %6s %-7s %-8s %-8s %s\n", "key", "count", "kind", "signal", "binary",
              "top frame");
  for (const auto& dir : dirs) {
    try {
      triage::Bundle b = triage::ReadBundle(dir);
      std::string signal = b.kind == "timeout" ? "-" : triage::SignalName(b.signal);
      std::printf("%-32s %6lu %-7s %-8s %-8s %s\n", b.key.Hex().c_str(),
                  static_cast<unsigned long>(registry.Count(b.key)), b.kind.c_str(),
                  signal.c_str(), b.binary_id.c_str(),
                  b.stack.empty() ? "?" : b.stack.front().c_str());
    } catch (const Error& e) {
      std::cerr << "sqlcov: " << dir.string() << ": " << e.what() << "\n";
      status = kUsage;
    }
  }
  return status;
}

// --- replay ---

struct ReplayArgs {
  std::string bundle;
  std::string config;
  std::string target_dir;
  std::string layout;
  int64_t timeout_ms = 0;  // 0: config value, else 1000
};

int CmdReplay(const ReplayArgs& args) {
  triage::Bundle bundle;
  try {
    bundle = triage::ReadBundle(args.bundle);
  } catch (const Error& e) {
    return Fail(kUsage, e.what());
  }
  fuzz::TargetOptions options;
  options.statement_timeout = std::chrono::milliseconds(args.timeout_ms > 0 ? args.timeout_ms
                                                                             : 1000);
  fs::path layout_path = args.layout;
  options.target_dir = args.target_dir;
  if (!args.config.empty()) {
    try {
      fuzz::FuzzConfig config = fuzz::LoadConfig(args.config);
      if (layout_path.empty()) layout_path = config.layout;
      if (options.target_dir.empty()) options.target_dir = config.target_dir;
      if (args.timeout_ms <= 0) options.statement_timeout = config.statement_timeout;
      options.case_timeout = config.case_timeout;
    } catch (const Error& e) {
      return Fail(kUsage, args.config + ": " + e.what());
    }
  }
  if (layout_path.empty() || options.target_dir.empty())
    return Fail(kUsage, "replay needs --config or both --target-dir and --layout");
  if (args.timeout_ms < 0) return Fail(kUsage, "--timeout-ms must be positive");
  options.case_timeout = std::max(options.case_timeout, options.statement_timeout);
  try {
    options.layout = planner::ParseLayout(ReadFile(layout_path.string()));
  } catch (const Error& e) {
    return Fail(kPlanningError, layout_path.string() + ": " + e.what());
  }
  options.session = "replay" + fuzz::DeriveSessionId();
  options.max_restarts = 3;
  try {
    fuzz::ReplayOutcome outcome = fuzz::Replay(bundle, std::move(options));
    std::cout << outcome.detail << "\n";
  } catch (const triage::BundleError& e) {
    return Fail(kUsage, e.what());
  } catch (const Error& e) {
    return Fail(kTargetFailure, e.what());
  }
  return kOk;
}

// --- stats ---

int CmdStats(const std::string& path) {
  std::vector<std::vector<fuzz::FuzzStats>> runs;
  try {
    if (!fs::is_regular_file(path)) return Fail(kUsage, "no such stats file: " + path);
    runs = fuzz::ReadStatsFile(path);
  } catch (const Error& e) {
    return Fail(kUsage, path + ": " + e.what());
  }
  std::printf("%4s %6s %10s %10s %8s %8s %6s %9s %8s\n", "run", "rows", "elapsed_s", "executions",
              "blocks", "paths", "corpus", "anomalies", "exec/s");
  for (size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].empty()) continue;
    const auto& last = runs[i].back();
    double rate = last.elapsed_seconds > 0 ? last.executions / last.elapsed_seconds : 0;
    std::printf("%4zu %6zu %10.1f %10lu %8lu %8lu %6lu %9lu %8.1f\n", i + 1, runs[i].size(),
                last.elapsed_seconds, static_cast<unsigned long>(last.executions),
                static_cast<unsigned long>(last.covered_blocks),
                static_cast<unsigned long>(last.paths), static_cast<unsigned long>(last.corpus),
                static_cast<unsigned long>(last.anomalies), rate);
  }
  return kOk;
}

}  // namespace
}  // namespace sqlcov

int main(int argc, char** argv) {
  using namespace sqlcov;
  CLI::App app{"Coverage-guided SQL fuzzing against a multi-process toy database"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Split, assign and link block manifests");
  plan_cmd->add_option("manifests", plan.manifests, "Manifest files")->required();
  plan_cmd->add_option("-o,--output", plan.output, "Layout file to write (default stdout)");

  FuzzArgs fuzz;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run a fuzzing campaign");
  fuzz_cmd->add_option("-c,--config", fuzz.config, "Campaign config file")->required();
  fuzz_cmd->add_flag("--dry-run", fuzz.dry_run, "Run the seeds only");
  fuzz_cmd->add_flag("--no-feedback", fuzz.no_feedback, "Blackbox mode: ignore coverage");
  fuzz_cmd->add_option("--budget-seconds", fuzz.budget_seconds);
  fuzz_cmd->add_option("--budget-executions", fuzz.budget_executions);
  fuzz_cmd->add_option("--session", fuzz.session);
  fuzz_cmd->add_option("--rng-seed", fuzz.rng_seed);
  fuzz_cmd->add_option("--stats", fuzz.stats, "Stats CSV (overrides the config)");
  fuzz_cmd->add_flag("-q,--quiet", fuzz.quiet);

  std::string reports, session;
  auto* triage_cmd = app.add_subcommand("triage", "List the bundles in a reports directory");
  triage_cmd->add_option("reports", reports, "Reports directory")->required();
  triage_cmd->add_option("--session", session, "Only this session");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a bundle's input on a fresh target");
  replay_cmd->add_option("bundle", replay.bundle, "Bundle directory")->required();
  replay_cmd->add_option("-c,--config", replay.config, "Campaign config for target and layout");
  replay_cmd->add_option("--target-dir", replay.target_dir);
  replay_cmd->add_option("--layout", replay.layout);
  replay_cmd->add_option("--timeout-ms", replay.timeout_ms, "Per-statement timeout");

  std::string stats_path;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a stats CSV");
  stats_cmd->add_option("file", stats_path, "Stats CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (plan_cmd->parsed()) return CmdPlan(plan);
  if (fuzz_cmd->parsed()) return CmdFuzz(fuzz);
  if (triage_cmd->parsed()) return CmdTriage(reports, session);
  if (replay_cmd->parsed()) return CmdReplay(replay);
  if (stats_cmd->parsed()) return CmdStats(stats_path);
  return 1;
}
