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

#include "sqlcov/triage/supervisor.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/prctl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "sqlcov/common/strings.h"

extern char** environ;

namespace sqlcov::triage {

namespace fs = std::filesystem;

namespace {

void SetNonBlocking(int fd) { fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK); }

void MakePipe(int& r, int& w) {
  int fds[2];
  if (pipe2(fds, O_CLOEXEC) != 0) throw LaunchError(std::string("pipe: ") + strerror(errno));
  r = fds[0];
  w = fds[1];
}

}  // namespace

Supervisor::Supervisor(SupervisorOptions options) : options_(std::move(options)) {
  prctl(PR_SET_CHILD_SUBREAPER, 1);
  MakePipe(event_r_, event_w_);
  MakePipe(control_r_, control_w_);
  SetNonBlocking(event_r_);
  SetNonBlocking(control_r_);
  thread_ = std::thread([this] { Run(); });
}

Supervisor::~Supervisor() {
  Stop();
  Wake('q');
  thread_.join();
  for (auto& [fd, pid] : output_fds_) close(fd);
  for (int fd : {event_r_, event_w_, control_r_, control_w_}) close(fd);
}

void Supervisor::Wake(char c) {
  while (write(control_w_, &c, 1) < 0 && errno == EINTR) {
  }
}

int Supervisor::LaunchOne(const ProcessSpec& spec) {
  std::vector<std::string> env_strings;
  std::map<std::string, std::string> extra = options_.env;
  extra["COVRT_BINARY"] = spec.binary_id;
  extra["COVRT_EVENT_FD"] = std::to_string(event_w_);
  extra["COVRT_CRASH_DIR"] = options_.crash_dir.string();
  for (char** e = environ; *e; ++e) {
    std::string_view kv(*e);
    auto eq = kv.find('=');
    if (eq != std::string_view::npos && extra.count(std::string(kv.substr(0, eq)))) continue;
    env_strings.emplace_back(kv);
  }
  for (const auto& [k, v] : extra) env_strings.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::vector<std::string> arg_strings{spec.executable.string()};
  arg_strings.insert(arg_strings.end(), spec.args.begin(), spec.args.end());
  std::vector<char*> argv;
  for (auto& s : arg_strings) argv.push_back(s.data());
  argv.push_back(nullptr);

  int out_r, out_w;
  MakePipe(out_r, out_w);
  std::lock_guard lock(mu_);  // the reaper must not see the pid before it is registered
  pid_t pid = fork();
  if (pid < 0) {
    close(out_r);
    close(out_w);
    throw LaunchError(std::string("fork: ") + strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    int null_fd = open("/dev/null", O_RDONLY);
    if (null_fd >= 0) dup2(null_fd, 0);
    dup2(out_w, 1);
    dup2(out_w, 2);
    fcntl(event_w_, F_SETFD, 0);
    execve(argv[0], argv.data(), envp.data());
    _exit(127);
  }
  setpgid(pid, pid);
  close(out_w);
  SetNonBlocking(out_r);
  ProcessInfo info;
  info.pid = pid;
  info.ppid = getpid();
  info.binary_id = spec.binary_id;
  info.launched = true;
  processes_[pid] = info;
  rings_.emplace(pid, OutputRing(options_.ring_capacity));
  output_fds_[out_r] = pid;
  return pid;
}

void Supervisor::Start() {
  std::error_code ec;
  fs::create_directories(options_.crash_dir, ec);
  {
    // Whatever is left belongs to an earlier, fully stopped generation.
    std::lock_guard lock(mu_);
    stopping_ = false;
    processes_.clear();
    rings_.clear();
    reported_.clear();
    current_.clear();
  }
  for (const ProcessSpec& spec : options_.processes) {
    if (!spec.ready_path.empty()) fs::remove(spec.ready_path, ec);
    int pid = LaunchOne(spec);
    {
      std::lock_guard lock(mu_);
      current_.push_back(pid);
    }
    Wake('w');
    const auto deadline = std::chrono::steady_clock::now() + options_.ready_timeout;
    for (;;) {
      if (spec.ready_path.empty() || fs::exists(spec.ready_path)) break;
      bool alive;
      {
        std::lock_guard lock(mu_);
        alive = processes_[pid].alive;
      }
      if (!alive || std::chrono::steady_clock::now() > deadline) {
        Sync();
        std::string output = OutputOf(spec.binary_id);
        Stop();
        throw LaunchError(spec.binary_id + (alive ? " did not become ready" : " exited at startup") +
                          (output.empty() ? "" : ": " + std::string(Trim(output))));
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  }
}

void Supervisor::Stop() {
  std::unique_lock lock(mu_);
  stopping_ = true;
  bool any = false;
  for (auto& [pid, info] : processes_) {
    if (!info.launched || !info.alive) continue;
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    any = true;
  }
  if (!any) return;
  lock.unlock();
  Wake('w');
  lock.lock();
  cv_.wait_for(lock, std::chrono::seconds(10), [&] {
    for (auto& [pid, info] : processes_)
      if (info.launched && info.alive) return false;
    return true;
  });
}

void Supervisor::Sync() {
  std::unique_lock lock(mu_);
  uint64_t want = ++sync_requested_;
  lock.unlock();
  Wake('s');
  lock.lock();
  cv_.wait(lock, [&] { return sync_done_ >= want; });
}

std::string Supervisor::TailFor(int pid) const {
  // Forked children share the output pipe of their launched ancestor.
  for (int hops = 0; hops < 16; ++hops) {
    auto it = processes_.find(pid);
    if (it == processes_.end()) return "";
    if (it->second.launched) {
      auto ring = rings_.find(pid);
      return ring == rings_.end() ? "" : ring->second.Contents();
    }
    pid = it->second.ppid;
  }
  return "";
}

std::vector<CrashNotice> Supervisor::TakeCrashes() {
  std::lock_guard lock(mu_);
  std::vector<CrashNotice> out(crashes_.begin(), crashes_.end());
  crashes_.clear();
  for (auto& c : out) c.log_tail = TailFor(c.pid);
  return out;
}

std::vector<ProcessInfo> Supervisor::Census() const {
  std::lock_guard lock(mu_);
  std::vector<ProcessInfo> out;
  for (const auto& [pid, info] : processes_) out.push_back(info);
  return out;
}

bool Supervisor::LaunchedAlive() const {
  std::lock_guard lock(mu_);
  if (current_.size() != options_.processes.size()) return false;
  for (int pid : current_) {
    auto it = processes_.find(pid);
    if (it == processes_.end() || !it->second.alive) return false;
  }
  return true;
}

std::string Supervisor::OutputOf(const std::string& binary_id) const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& [pid, info] : processes_) {
    if (info.launched && info.binary_id == binary_id) {
      auto ring = rings_.find(pid);
      if (ring != rings_.end()) out = ring->second.Contents();
    }
  }
  return out;
}

std::map<std::string, std::string> Supervisor::ObjectNames() const {
  std::map<std::string, std::string> out;
  for (const auto& spec : options_.processes)
    out[spec.executable.filename().string()] = spec.binary_id;
  return out;
}

void Supervisor::Run() {
  for (;;) {
    std::vector<pollfd> fds{{control_r_, POLLIN, 0}, {event_r_, POLLIN, 0}};
    {
      std::lock_guard lock(mu_);
      for (const auto& [fd, pid] : output_fds_) fds.push_back({fd, POLLIN, 0});
    }
    poll(fds.data(), fds.size(), 20);
    bool quit = false, sync = false;
    char buf[64];
    ssize_t n;
    while ((n = read(control_r_, buf, sizeof(buf))) > 0) {
      for (ssize_t i = 0; i < n; ++i) {
        if (buf[i] == 'q') quit = true;
        if (buf[i] == 's') sync = true;
      }
    }
    uint64_t target = 0;
    if (sync) {
      std::lock_guard lock(mu_);
      target = sync_requested_;
    }
    DrainOutputs();
    DrainEvents();
    Reap();
    {
      std::lock_guard lock(mu_);
      if (sync) sync_done_ = std::max(sync_done_, target);
    }
    cv_.notify_all();
    if (quit) return;
  }
}

void Supervisor::DrainOutputs() {
  std::lock_guard lock(mu_);
  std::vector<int> closed;
  char buf[8192];
  for (const auto& [fd, pid] : output_fds_) {
    for (;;) {
      ssize_t n = read(fd, buf, sizeof(buf));
      if (n > 0) {
        auto ring = rings_.find(pid);
        if (ring != rings_.end()) ring->second.Append(std::string_view(buf, static_cast<size_t>(n)));
        continue;
      }
      if (n == 0) closed.push_back(fd);
      if (n < 0 && errno == EINTR) continue;
      break;
    }
  }
  for (int fd : closed) {
    close(fd);
    output_fds_.erase(fd);
  }
}

void Supervisor::DrainEvents() {
  char buf[4096];
  ssize_t n;
  while ((n = read(event_r_, buf, sizeof(buf))) > 0) event_buffer_.append(buf, static_cast<size_t>(n));
  size_t nl;
  while ((nl = event_buffer_.find('\n')) != std::string::npos) {
    std::string line = event_buffer_.substr(0, nl);
    event_buffer_.erase(0, nl + 1);
    HandleEventLine(line);
  }
}

void Supervisor::HandleEventLine(const std::string& line) {
  auto f = SplitWhitespace(line);
  std::lock_guard lock(mu_);
  if (f.size() == 4 && f[0] == "H") {
    int pid = std::stoi(std::string(f[1]));
    ProcessInfo& info = processes_[pid];
    info.pid = pid;
    if (!info.launched) info.ppid = std::stoi(std::string(f[2]));
    info.binary_id = std::string(f[3]);
  } else if (f.size() == 3 && f[0] == "C") {
    CrashNotice c;
    c.pid = std::stoi(std::string(f[1]));
    c.signal = std::stoi(std::string(f[2]));
    auto it = processes_.find(c.pid);
    if (it != processes_.end()) c.binary_id = it->second.binary_id;
    fs::path report = options_.crash_dir / ("crash-" + std::to_string(c.pid) + ".txt");
    try {
      c.report = ParseCrashReport(ReadFile(report.string()));
      if (c.binary_id.empty()) c.binary_id = c.report->binary_id;
    } catch (const std::exception&) {
      c.report.reset();
    }
    reported_.insert(c.pid);
    crashes_.push_back(std::move(c));
  }
}

void Supervisor::Reap() {
  // Only pids this supervisor knows: waitpid(-1) would steal children from
  // other supervisors in the same process.
  std::lock_guard lock(mu_);
  for (auto& [pid, info] : processes_) {
    if (!info.alive) continue;
    int status = 0;
    pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == 0) continue;
    if (r < 0) {
      // Not our child (a worker whose parent is still running); the parent
      // reaps it, we only notice that it is gone.
      if (errno == ECHILD && kill(pid, 0) != 0 && errno == ESRCH) info.alive = false;
      continue;
    }
    info.alive = false;
    if (WIFEXITED(status)) info.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) {
      info.term_signal = WTERMSIG(status);
      // A fatal signal the reporter never saw, e.g. an external SIGKILL.
      if (!stopping_ && !reported_.count(pid)) {
        CrashNotice c;
        c.pid = pid;
        c.signal = info.term_signal;
        c.binary_id = info.binary_id;
        crashes_.push_back(std::move(c));
      }
    }
  }
}

}  // namespace sqlcov::triage
