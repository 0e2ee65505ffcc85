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

#ifndef SQLCOV_FUZZ_LOOP_H_
#define SQLCOV_FUZZ_LOOP_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "sqlcov/common/rng.h"
#include "sqlcov/coverage/novelty.h"
#include "sqlcov/fuzz/config.h"
#include "sqlcov/fuzz/corpus.h"
#include "sqlcov/fuzz/target.h"
#include "sqlcov/sql/dictionary.h"
#include "sqlcov/sql/fragments.h"
#include "sqlcov/triage/registry.h"

namespace sqlcov::fuzz {

struct FuzzStats {
  double elapsed_seconds = 0;
  uint64_t executions = 0;  // generated cases; seeds are not counted
  uint64_t covered_blocks = 0;
  uint64_t paths = 0;  // distinct covered-index sets
  uint64_t corpus = 0;
  uint64_t anomalies = 0;  // distinct dedup keys this session
  uint64_t crashes = 0;
  uint64_t timeouts = 0;
  uint64_t duplicates = 0;
  uint64_t restarts = 0;
};

inline constexpr const char* kStatsHeader =
    "elapsed_s,executions,covered_blocks,paths,corpus,anomalies";
std::string FormatStatsRow(const FuzzStats& stats);

// Stats rows already present in a file, split into runs: a run starts at
// each header line.
std::vector<std::vector<FuzzStats>> ReadStatsFile(const std::filesystem::path& path);

// Name of the cumulative coverage file written into the session directory.
inline constexpr const char* kCoverageFile = "coverage.snap";

// pickNext -> generate -> evaluate -> admit -> triage until the budget is
// spent. Seeds run first, each on a freshly started target.
class FuzzLoop {
 public:
  using Observer = std::function<void(const sql::TestCase&, const ExecutionResult&)>;

  explicit FuzzLoop(FuzzConfig config, std::ostream* log = nullptr);
  ~FuzzLoop();

  // Throws TargetError when the target cannot be restarted, Error on bad
  // inputs.
  FuzzStats Run();

  void set_observer(Observer observer) { observer_ = std::move(observer); }
  void set_target_env(std::map<std::string, std::string> env) { target_env_ = std::move(env); }

  const std::string& session() const { return session_; }
  std::filesystem::path session_dir() const { return config_.reports_dir / session_; }
  const coverage::CumulativeTable& cumulative() const { return cumulative_; }
  const Corpus& corpus() const { return corpus_; }
  uint64_t rng_seed() const { return rng_seed_; }

 private:
  void RunSeeds(TargetSession& target, triage::Triager& triager);
  void Record(const sql::TestCase& test_case, const ExecutionResult& result,
              triage::Triager& triager, bool seed);
  FuzzStats Snapshot() const;
  void WriteRow(std::ostream& out);

  FuzzConfig config_;
  std::ostream* log_;
  std::string session_;
  uint64_t rng_seed_ = 0;
  Rng rng_;
  planner::GlobalLayout layout_;
  sql::Dictionary dictionary_;
  sql::FragmentPool pool_;
  Corpus corpus_;
  coverage::CumulativeTable cumulative_;
  std::unordered_set<uint64_t> paths_;
  std::set<triage::DedupKey> keys_;
  FuzzStats stats_;
  std::chrono::steady_clock::time_point started_;
  Observer observer_;
  std::map<std::string, std::string> target_env_;
};

}  // namespace sqlcov::fuzz

#endif  // SQLCOV_FUZZ_LOOP_H_
