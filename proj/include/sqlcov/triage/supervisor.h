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

#ifndef SQLCOV_TRIAGE_SUPERVISOR_H_
#define SQLCOV_TRIAGE_SUPERVISOR_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/triage/anomaly.h"
#include "sqlcov/triage/output_ring.h"

namespace sqlcov::triage {

class LaunchError : public Error {
 public:
  using Error::Error;
};

struct ProcessSpec {
  std::string binary_id;
  std::filesystem::path executable;
  std::vector<std::string> args;
  // Launch of the next process waits until this path exists.
  std::filesystem::path ready_path;
};

struct SupervisorOptions {
  std::vector<ProcessSpec> processes;  // launch order
  std::map<std::string, std::string> env;
  std::filesystem::path crash_dir;
  size_t ring_capacity = OutputRing::kDefaultCapacity;
  std::chrono::milliseconds ready_timeout{5000};
};

struct ProcessInfo {
  int pid = 0;
  int ppid = 0;
  std::string binary_id;
  bool launched = false;  // started by the supervisor rather than forked
  bool alive = true;
  int exit_code = -1;
  int term_signal = 0;
};

// A fatal signal observed in the supervised tree.
struct CrashNotice {
  int pid = 0;
  int signal = 0;
  std::string binary_id;
  std::optional<CrashReport> report;  // absent if the in-process reporter did not run
  std::string log_tail;
};

// Launches the target processes in their own process groups, collects
// their output into per-process rings and watches the whole tree: targets
// announce themselves and their forked children over an event pipe, and
// the supervisor is the subreaper for anything orphaned.
class Supervisor {
 public:
  explicit Supervisor(SupervisorOptions options);
  ~Supervisor();
  Supervisor(const Supervisor&) = delete;
  Supervisor& operator=(const Supervisor&) = delete;

  void Start();
  // Kills every process group and waits for the launched processes.
  void Stop();
  // Returns once every event and output byte written before the call has
  // been processed.
  void Sync();

  std::vector<CrashNotice> TakeCrashes();
  std::vector<ProcessInfo> Census() const;
  bool LaunchedAlive() const;
  // Ring contents of the launched process for `binary_id`.
  std::string OutputOf(const std::string& binary_id) const;
  // Executable file name -> binary id, for frame normalization.
  std::map<std::string, std::string> ObjectNames() const;
  const SupervisorOptions& options() const { return options_; }

 private:
  void Run();
  void DrainOutputs();
  void DrainEvents();
  void Reap();
  void HandleEventLine(const std::string& line);
  void Wake(char c);
  int LaunchOne(const ProcessSpec& spec);
  std::string TailFor(int pid) const;

  SupervisorOptions options_;
  int event_r_ = -1, event_w_ = -1;
  int control_r_ = -1, control_w_ = -1;
  std::thread thread_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<int, ProcessInfo> processes_;
  std::map<int, OutputRing> rings_;  // by launched pid
  std::map<int, int> output_fds_;    // fd -> launched pid
  std::deque<CrashNotice> crashes_;
  std::set<int> reported_;  // pids with a reporter crash line
  std::vector<int> current_;  // launched by the latest Start()
  std::string event_buffer_;
  uint64_t sync_requested_ = 0;
  uint64_t sync_done_ = 0;
  bool stopping_ = false;
};

}  // namespace sqlcov::triage

#endif  // SQLCOV_TRIAGE_SUPERVISOR_H_
