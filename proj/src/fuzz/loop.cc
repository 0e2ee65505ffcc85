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

#include "sqlcov/fuzz/loop.h"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sqlcov/common/hash.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/triage/registry.h"

namespace sqlcov::fuzz {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

uint64_t PathHash(const std::vector<uint32_t>& covered) {
  Fnv1a h;
  for (uint32_t i : covered) h.Update(uint64_t{i});
  return h.digest();
}

coverage::CoverageSnapshot TableAsSnapshot(const coverage::CumulativeTable& table) {
  coverage::CoverageSnapshot snap;
  snap.counters = table.max_bucket;
  snap.timestamp = Clock::now();
  return snap;
}

}  // namespace

std::string FormatStatsRow(const FuzzStats& s) {
  char elapsed[32];
  std::snprintf(elapsed, sizeof(elapsed), "%.1f", s.elapsed_seconds);
  std::ostringstream out;
  out << elapsed << ',' << s.executions << ',' << s.covered_blocks << ',' << s.paths << ','
      << s.corpus << ',' << s.anomalies;
  return out.str();
}

std::vector<std::vector<FuzzStats>> ReadStatsFile(const fs::path& path) {
  std::vector<std::vector<FuzzStats>> runs;
  std::istringstream in(ReadFile(path.string()));
  std::string line;
  uint32_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    if (Trim(line) == kStatsHeader) {
      runs.emplace_back();
      continue;
    }
    if (runs.empty()) throw ParseError("stats row before header", line_no, 1);
    FuzzStats s;
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lu,%lu,%lu,%lu,%lu%c", &s.elapsed_seconds,
                    &s.executions, &s.covered_blocks, &s.paths, &s.corpus, &s.anomalies,
                    &extra) != 6)
      throw ParseError("malformed stats row", line_no, 1);
    runs.back().push_back(s);
  }
  return runs;
}

FuzzLoop::FuzzLoop(FuzzConfig config, std::ostream* log)
    : config_(std::move(config)), log_(log), corpus_(config_.base_energy) {
  config_.Validate();
  session_ = config_.session.empty() ? DeriveSessionId() : config_.session;
  rng_seed_ = config_.rng_seed ? *config_.rng_seed : std::random_device{}() * 0x9e3779b97f4a7c15ULL;
  rng_.seed(rng_seed_);
  layout_ = planner::ParseLayout(ReadFile(config_.layout.string()));
  dictionary_ = config_.dictionary.empty() ? sql::DefaultDictionary()
                                           : sql::LoadDictionary(config_.dictionary);
  cumulative_ = coverage::CumulativeTable(layout_.total_length);
}

FuzzLoop::~FuzzLoop() = default;

FuzzStats FuzzLoop::Snapshot() const {
  FuzzStats s = stats_;
  s.elapsed_seconds = std::chrono::duration<double>(Clock::now() - started_).count();
  s.covered_blocks = cumulative_.CoveredCount();
  s.paths = paths_.size();
  s.corpus = corpus_.size();
  s.anomalies = keys_.size();
  return s;
}

void FuzzLoop::WriteRow(std::ostream& out) {
  out << FormatStatsRow(Snapshot()) << '\n';
  out.flush();
}

void FuzzLoop::Record(const sql::TestCase& test_case, const ExecutionResult& result,
                      triage::Triager& triager, bool seed) {
  const std::vector<uint32_t> covered = result.snapshot.CoveredIndices();
  bool interesting = false;
  if (seed) {
    corpus_.Add(test_case, covered, true);
  } else if (config_.feedback && result.status != ExecutionStatus::kTimeout) {
    interesting = coverage::Classify(result.snapshot, cumulative_).interesting();
    if (interesting) corpus_.Add(test_case, covered, false, corpus_.favored_energy());
  }
  coverage::UnionInto(cumulative_, result.snapshot);
  if (!covered.empty()) paths_.insert(PathHash(covered));
  if (config_.feedback) pool_.InsertAll(sql::HarvestFragments(test_case, seed || interesting));

  for (const auto& event : result.anomalies) {
    if (event.kind == triage::AnomalyKind::kTimeout)
      ++stats_.timeouts;
    else
      ++stats_.crashes;
    triage::TriageOutcome outcome = triager.Triage(event, cumulative_);
    keys_.insert(outcome.key);
    if (outcome.verdict == triage::Verdict::kDuplicate) {
      ++stats_.duplicates;
    } else if (log_) {
      *log_ << "new " << triage::AnomalyKindName(event.kind) << " in " << event.binary_id
            << " (" << triage::SignalName(event.signal) << "): " << outcome.bundle.string()
            << "\n";
    }
  }
  if (observer_) observer_(test_case, result);
}

void FuzzLoop::RunSeeds(TargetSession& target, triage::Triager& triager) {
  std::vector<sql::SeedCase> seeds = sql::LoadSeedCorpus(config_.seed_dir);
  if (seeds.empty()) throw Error("no seeds in " + config_.seed_dir.string());
  for (size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) target.Restart();
    sql::TestCase test_case;
    test_case.statements = seeds[i].statements;
    pool_.InsertAll(sql::HarvestStatements(test_case.statements));
    ExecutionResult result = target.Evaluate(test_case.statements);
    if (result.status != ExecutionStatus::kOk && log_)
      *log_ << "seed " << seeds[i].path.filename().string() << ": "
            << ExecutionStatusName(result.status) << "\n";
    Record(test_case, result, triager, true);
  }
}

FuzzStats FuzzLoop::Run() {
  started_ = Clock::now();
  stats_ = {};
  TargetOptions topts;
  topts.target_dir = config_.target_dir;
  topts.layout = layout_;
  topts.session = session_;
  topts.statement_timeout = config_.statement_timeout;
  topts.case_timeout = config_.case_timeout;
  topts.max_restarts = config_.max_restarts;
  topts.env = target_env_;
  TargetSession target(std::move(topts));
  triage::Triager triager(config_.reports_dir, session_);

  std::ofstream stats_out;
  if (!config_.stats.empty()) {
    if (config_.stats.has_parent_path()) fs::create_directories(config_.stats.parent_path());
    stats_out.open(config_.stats, std::ios::app);
    if (!stats_out) throw Error("cannot open stats file " + config_.stats.string());
    stats_out << kStatsHeader << '\n';
  }
  if (log_)
    *log_ << "session " << session_ << " rng_seed " << rng_seed_
          << (config_.feedback ? "" : " (no feedback)") << "\n";

  target.Start();
  RunSeeds(target, triager);
  if (stats_out) WriteRow(stats_out);

  auto budget_left = [&] {
    if (config_.budget_executions && stats_.executions >= *config_.budget_executions)
      return false;
    if (config_.budget_seconds &&
        std::chrono::duration<double>(Clock::now() - started_).count() >= *config_.budget_seconds)
      return false;
    return true;
  };

  if (!config_.dry_run) {
    target.Restart();
    sql::MutationOptions mutation;
    mutation.function_names.assign(dictionary_.function_names.begin(),
                                   dictionary_.function_names.end());
    auto last_flush = Clock::now();
    const auto flush_every = std::chrono::duration<double>(config_.stats_interval_seconds);
    while (budget_left()) {
      const CorpusEntry& parent = corpus_.PickNext();
      sql::GeneratorInputs in;
      in.parent_id = parent.id;
      in.parent = &parent.test_case.statements;
      in.mix = config_.mix;
      in.pool = &pool_;
      in.dictionary = &dictionary_;
      in.mutation = mutation;
      sql::TestCase test_case = sql::Generate(in, rng_);
      ExecutionResult result = target.Evaluate(test_case.statements);
      ++stats_.executions;
      Record(test_case, result, triager, false);
      if (config_.drop_interval && stats_.executions % config_.drop_interval == 0 &&
          !result.restarted)
        target.Restart();
      if (stats_out && Clock::now() - last_flush >= flush_every) {
        WriteRow(stats_out);
        last_flush = Clock::now();
      }
    }
  }

  stats_.restarts = target.restarts();
  FuzzStats final_stats = Snapshot();
  if (stats_out) WriteRow(stats_out);
  fs::create_directories(session_dir());
  coverage::WriteSnapshotFile((session_dir() / kCoverageFile).string(),
                              TableAsSnapshot(cumulative_));
  if (log_)
    *log_ << "done: " << final_stats.executions << " executions, " << final_stats.covered_blocks
          << " blocks, " << final_stats.paths << " paths, " << final_stats.corpus
          << " corpus entries, " << final_stats.anomalies << " unique anomalies ("
          << final_stats.crashes << " crashes, " << final_stats.timeouts << " timeouts)\n";
  return final_stats;
}

}  // namespace sqlcov::fuzz
