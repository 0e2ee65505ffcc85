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

#ifndef SQLCOV_FUZZ_TARGET_H_
#define SQLCOV_FUZZ_TARGET_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/coverage/region.h"
#include "sqlcov/coverage/snapshot.h"
#include "sqlcov/planner/layout.h"
#include "sqlcov/toydb/wire.h"
#include "sqlcov/triage/anomaly.h"
#include "sqlcov/triage/supervisor.h"

namespace sqlcov::fuzz {

// The target could not be brought back after repeated restarts.
class TargetError : public Error {
 public:
  using Error::Error;
};

// Launch order of the toy target.
inline constexpr const char* kTargetBinaries[] = {"storage", "query", "gateway"};

struct TargetOptions {
  std::filesystem::path target_dir;
  planner::GlobalLayout layout;
  std::string session;
  std::chrono::milliseconds statement_timeout{1000};
  std::chrono::milliseconds case_timeout{10000};
  uint32_t max_restarts = 5;
  // Extra environment for the target processes, e.g. TOYDB_TRACE.
  std::map<std::string, std::string> env;
};

enum class ExecutionStatus : uint8_t { kOk, kCrash, kTimeout, kConnectionLost };

std::string_view ExecutionStatusName(ExecutionStatus status);

struct ExecutionResult {
  ExecutionStatus status = ExecutionStatus::kOk;
  int signal = 0;
  // Summed coverage of the statements that completed without an anomaly.
  coverage::CoverageSnapshot snapshot;
  // Crashes and timeouts, each with the coverage of its own statement.
  std::vector<triage::AnomalyEvent> anomalies;
  std::vector<toydb::Client::Reply> replies;  // one per statement sent
  std::chrono::milliseconds duration{0};
  std::string log_tail;
  bool restarted = false;
};

// One running instance of the toy target with its coverage region, its
// supervisor and a single client connection. Not thread-safe: one test case
// in flight at a time.
class TargetSession {
 public:
  explicit TargetSession(TargetOptions options);
  ~TargetSession();
  TargetSession(const TargetSession&) = delete;
  TargetSession& operator=(const TargetSession&) = delete;

  // Launches the processes. Throws TargetError after max_restarts failed
  // attempts.
  void Start();
  // Fresh processes, hence a fresh database.
  void Restart();
  void Stop();

  // Statements are sent in order; the first anomaly ends the case.
  ExecutionResult Evaluate(const std::vector<std::string>& statements);

  const coverage::CoverageRegion& region() const { return region_; }
  triage::Supervisor& supervisor() { return *supervisor_; }
  const std::filesystem::path& work_dir() const { return work_dir_; }
  uint64_t restarts() const { return restarts_; }

 private:
  triage::AnomalyEvent FromCrash(const triage::CrashNotice& notice) const;

  TargetOptions options_;
  std::filesystem::path work_dir_;
  coverage::CoverageRegion region_;
  std::unique_ptr<triage::Supervisor> supervisor_;
  toydb::Client client_;
  bool running_ = false;
  uint64_t restarts_ = 0;
};

}  // namespace sqlcov::fuzz

#endif  // SQLCOV_FUZZ_TARGET_H_
