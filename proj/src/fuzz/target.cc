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

#include "sqlcov/fuzz/target.h"

#include <unistd.h>

#include <thread>

#include "sqlcov/coverage/novelty.h"

namespace sqlcov::fuzz {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

fs::path SocketPath(const fs::path& dir, std::string_view binary) {
  return dir / (std::string(binary) + ".sock");
}

}  // namespace

std::string_view ExecutionStatusName(ExecutionStatus status) {
  switch (status) {
    case ExecutionStatus::kOk:
      return "ok";
    case ExecutionStatus::kCrash:
      return "crash";
    case ExecutionStatus::kTimeout:
      return "timeout";
    case ExecutionStatus::kConnectionLost:
      return "connection-lost";
  }
  return "?";
}

TargetSession::TargetSession(TargetOptions options)
    : options_(std::move(options)),
      work_dir_(fs::temp_directory_path() /
                ("sqlcov-" + options_.session + "-" + std::to_string(getpid()))),
      region_(coverage::CoverageRegion::Create(options_.layout, options_.session)) {
  fs::create_directories(work_dir_);
  triage::SupervisorOptions sup;
  sup.env = options_.env;
  sup.env[coverage::kRegionEnv] = region_.name();
  sup.crash_dir = work_dir_ / "crashes";
  const char* upstream_of[] = {"", "storage", "query"};
  for (size_t i = 0; i < std::size(kTargetBinaries); ++i) {
    std::string id = kTargetBinaries[i];
    triage::ProcessSpec spec;
    spec.binary_id = id;
    spec.executable = options_.target_dir / ("toydb_" + id);
    spec.args = {"--listen", SocketPath(work_dir_, id).string()};
    if (*upstream_of[i]) {
      spec.args.push_back("--upstream");
      spec.args.push_back(SocketPath(work_dir_, upstream_of[i]).string());
    }
    spec.ready_path = SocketPath(work_dir_, id);
    sup.processes.push_back(std::move(spec));
  }
  supervisor_ = std::make_unique<triage::Supervisor>(std::move(sup));
}

TargetSession::~TargetSession() {
  Stop();
  supervisor_.reset();
  std::error_code ec;
  fs::remove_all(work_dir_, ec);
}

void TargetSession::Start() {
  std::string last_error;
  for (uint32_t attempt = 0; attempt < options_.max_restarts; ++attempt) {
    try {
      supervisor_->Start();
      client_ = toydb::Client(toydb::ConnectUnixRetry(
          SocketPath(work_dir_, "gateway").string(), std::chrono::milliseconds(5000)));
      region_.Reset();
      running_ = true;
      return;
    } catch (const Error& e) {
      last_error = e.what();
      supervisor_->Stop();
    }
  }
  throw TargetError("target failed to start after " + std::to_string(options_.max_restarts) +
                    " attempts: " + last_error);
}

void TargetSession::Stop() {
  client_.Close();
  if (running_) supervisor_->Stop();
  running_ = false;
}

void TargetSession::Restart() {
  Stop();
  ++restarts_;
  Start();
}

triage::AnomalyEvent TargetSession::FromCrash(const triage::CrashNotice& notice) const {
  triage::AnomalyEvent event;
  event.kind = triage::AnomalyKind::kCrash;
  event.pid = notice.pid;
  event.binary_id = notice.binary_id;
  event.signal = notice.signal;
  if (notice.report) {
    event.fault_address = notice.report->address;
    event.registers = notice.report->registers;
    event.stack = triage::NormalizeFrames(notice.report->frames, supervisor_->ObjectNames());
  }
  if (const auto* window = options_.layout.Find(notice.binary_id)) event.fault_window = *window;
  event.log_tail = notice.log_tail;
  event.occurred_at = std::chrono::system_clock::now();
  return event;
}

ExecutionResult TargetSession::Evaluate(const std::vector<std::string>& statements) {
  if (!running_) Start();
  ExecutionResult result;
  result.snapshot.counters.assign(options_.layout.total_length, 0);
  const auto started = Clock::now();
  const auto case_deadline = started + options_.case_timeout;
  bool restart = false;

  for (size_t i = 0; i < statements.size(); ++i) {
    auto budget = std::chrono::duration_cast<std::chrono::milliseconds>(case_deadline -
                                                                        Clock::now());
    budget = std::min(budget, options_.statement_timeout);
    region_.Reset();
    toydb::Client::Reply reply{toydb::Client::Status::kTimeout, ""};
    if (budget.count() > 0) reply = client_.Execute(statements[i], budget);
    supervisor_->Sync();
    std::vector<triage::CrashNotice> crashes = supervisor_->TakeCrashes();
    if (crashes.empty() && reply.status == toydb::Client::Status::kLost) {
      // The reporter may not have run; give the reaper a moment.
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      supervisor_->Sync();
      crashes = supervisor_->TakeCrashes();
    }
    coverage::CoverageSnapshot snap = region_.Snapshot();
    result.replies.push_back(reply);

    std::vector<std::string> input(statements.begin(), statements.begin() + i + 1);
    for (const auto& notice : crashes) {
      triage::AnomalyEvent event = FromCrash(notice);
      event.coverage = snap;
      event.input = input;
      event.statement_index = i;
      if (result.anomalies.empty()) {
        result.status = ExecutionStatus::kCrash;
        result.signal = notice.signal;
        result.log_tail = notice.log_tail;
      }
      result.anomalies.push_back(std::move(event));
    }
    if (!crashes.empty()) {
      for (const auto& p : supervisor_->Census())
        for (const auto& notice : crashes)
          if (p.pid == notice.pid && p.launched) restart = true;
      if (!supervisor_->LaunchedAlive() || reply.status == toydb::Client::Status::kLost ||
          reply.status == toydb::Client::Status::kTimeout)
        restart = true;
      break;
    }
    if (reply.status == toydb::Client::Status::kTimeout) {
      triage::AnomalyEvent event;
      event.kind = triage::AnomalyKind::kTimeout;
      event.binary_id = "gateway";
      event.coverage = snap;
      event.input = input;
      event.statement_index = i;
      event.log_tail = supervisor_->OutputOf("gateway");
      event.occurred_at = std::chrono::system_clock::now();
      result.status = ExecutionStatus::kTimeout;
      result.log_tail = event.log_tail;
      result.anomalies.push_back(std::move(event));
      restart = true;
      break;
    }
    if (reply.status == toydb::Client::Status::kLost) {
      result.status = ExecutionStatus::kConnectionLost;
      result.log_tail = supervisor_->OutputOf("gateway");
      restart = true;
      break;
    }
    coverage::Accumulate(result.snapshot, snap);
  }
  result.snapshot.timestamp = Clock::now();
  result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  if (restart || !supervisor_->LaunchedAlive()) {
    Restart();
    result.restarted = true;
  }
  return result;
}

}  // namespace sqlcov::fuzz
