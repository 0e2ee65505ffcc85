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

#include "crash.h"

#include <dlfcn.h>
#include <execinfo.h>
#include <fcntl.h>
#include <pthread.h>
#include <signal.h>
#include <sys/ucontext.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace sqlcov::toydb {

namespace {

constexpr int kSignals[] = {SIGSEGV, SIGBUS, SIGFPE, SIGILL, SIGABRT, SIGTRAP};
constexpr size_t kMaxFrames = 64;

char g_binary[64];
char g_crash_dir[1024];
int g_event_fd = -1;
char g_report[32 * 1024];

void WriteAll(int fd, const char* data, size_t n) {
  while (n > 0) {
    ssize_t w = write(fd, data, n);
    if (w <= 0) return;
    data += w;
    n -= static_cast<size_t>(w);
  }
}

void Announce() {
  if (g_event_fd < 0) return;
  char line[128];
  int n = std::snprintf(line, sizeof(line), "H %d %d %s\n", static_cast<int>(getpid()),
                        static_cast<int>(getppid()), g_binary);
  if (n > 0) WriteAll(g_event_fd, line, static_cast<size_t>(n));
}

struct Appender {
  size_t used = 0;
  template <typename... Args>
  void operator()(const char* fmt, Args... args) {
    if (used >= sizeof(g_report)) return;
    int n = std::snprintf(g_report + used, sizeof(g_report) - used, fmt, args...);
    if (n > 0) used = std::min(sizeof(g_report), used + static_cast<size_t>(n));
  }
};

void AppendRegisters(Appender& out, const ucontext_t* uc) {
#if defined(__x86_64__)
  static constexpr struct {
    const char* name;
    int index;
  } kRegs[] = {{"rip", REG_RIP}, {"rsp", REG_RSP}, {"rbp", REG_RBP}, {"rax", REG_RAX},
               {"rbx", REG_RBX}, {"rcx", REG_RCX}, {"rdx", REG_RDX}, {"rsi", REG_RSI},
               {"rdi", REG_RDI}, {"r8", REG_R8},   {"r9", REG_R9},   {"r10", REG_R10},
               {"r11", REG_R11}, {"r12", REG_R12}, {"r13", REG_R13}, {"r14", REG_R14},
               {"r15", REG_R15}, {"efl", REG_EFL}};
  for (const auto& r : kRegs) {
    out("reg %s 0x%llx\n", r.name,
        static_cast<unsigned long long>(uc->uc_mcontext.gregs[r.index]));
  }
#else
  (void)out;
  (void)uc;
#endif
}

uintptr_t FaultPc(const ucontext_t* uc) {
#if defined(__x86_64__)
  return static_cast<uintptr_t>(uc->uc_mcontext.gregs[REG_RIP]);
#else
  (void)uc;
  return 0;
#endif
}

void OnFatalSignal(int sig, siginfo_t* info, void* context) {
  const auto* uc = static_cast<const ucontext_t*>(context);
  Appender out;
  out("pid %d\n", static_cast<int>(getpid()));
  out("binary %s\n", g_binary);
  out("signal %d\n", sig);
  out("address 0x%llx\n", reinterpret_cast<unsigned long long>(info->si_addr));
  AppendRegisters(out, uc);

  void* frames[kMaxFrames];
  int n = backtrace(frames, static_cast<int>(kMaxFrames));
  // Skip the handler's own frames: start at the interrupted pc when the
  // unwinder reports it, otherwise after the signal trampoline.
  const uintptr_t pc = FaultPc(uc);
  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (reinterpret_cast<uintptr_t>(frames[i]) == pc) {
      start = i;
      break;
    }
  }
  if (start < 0) start = n > 2 ? 2 : 0;
  for (int i = start; i < n; ++i) {
    auto addr = reinterpret_cast<uintptr_t>(frames[i]);
    // Return addresses point after the call; look up the call itself.
    uintptr_t lookup = i == start ? addr : addr - 1;
    Dl_info dl{};
    if (dladdr(reinterpret_cast<void*>(lookup), &dl) && dl.dli_fname) {
      const char* object = std::strrchr(dl.dli_fname, '/');
      object = object ? object + 1 : dl.dli_fname;
      if (dl.dli_sname) {
        out("frame 0x%llx %s %s 0x%llx\n", static_cast<unsigned long long>(addr), object,
            dl.dli_sname,
            static_cast<unsigned long long>(lookup - reinterpret_cast<uintptr_t>(dl.dli_saddr)));
      } else {
        out("frame 0x%llx %s ? 0x%llx\n", static_cast<unsigned long long>(addr), object,
            static_cast<unsigned long long>(lookup - reinterpret_cast<uintptr_t>(dl.dli_fbase)));
      }
    } else {
      out("frame 0x%llx ? ? 0x0\n", static_cast<unsigned long long>(addr));
    }
  }

  if (g_crash_dir[0]) {
    char path[1100];
    std::snprintf(path, sizeof(path), "%s/crash-%d.txt", g_crash_dir, static_cast<int>(getpid()));
    int fd = open(path, O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd >= 0) {
      WriteAll(fd, g_report, out.used);
      close(fd);
    }
  }
  if (g_event_fd >= 0) {
    char line[64];
    int len = std::snprintf(line, sizeof(line), "C %d %d\n", static_cast<int>(getpid()), sig);
    if (len > 0) WriteAll(g_event_fd, line, static_cast<size_t>(len));
  }
  signal(sig, SIG_DFL);
  raise(sig);
}

}  // namespace

void InstallCrashReporter(std::string_view binary_id) {
  std::snprintf(g_binary, sizeof(g_binary), "%.*s", static_cast<int>(binary_id.size()),
                binary_id.data());
  if (const char* dir = std::getenv("COVRT_CRASH_DIR"))
    std::snprintf(g_crash_dir, sizeof(g_crash_dir), "%s", dir);
  if (const char* fd = std::getenv("COVRT_EVENT_FD")) {
    g_event_fd = std::atoi(fd);
    if (fcntl(g_event_fd, F_GETFD) < 0) g_event_fd = -1;
  }

  // backtrace() loads libgcc lazily; do it now rather than in the handler.
  void* warm[2];
  backtrace(warm, 2);

  static char alt_stack[64 * 1024];
  stack_t ss{};
  ss.ss_sp = alt_stack;
  ss.ss_size = sizeof(alt_stack);
  sigaltstack(&ss, nullptr);

  struct sigaction sa{};
  sa.sa_sigaction = OnFatalSignal;
  sa.sa_flags = SA_SIGINFO | SA_ONSTACK | SA_RESETHAND;
  sigemptyset(&sa.sa_mask);
  for (int sig : kSignals) sigaction(sig, &sa, nullptr);

  Announce();
  pthread_atfork(nullptr, nullptr, Announce);
}

void AssertFail(const char* condition, const char* file, int line) {
  std::fprintf(stderr, "toydb assertion failed: %s at %s:%d\n", condition, file, line);
  std::fflush(stderr);
  std::abort();
}

}  // namespace sqlcov::toydb
