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

#ifndef SQLCOV_TOYDB_CRASH_H_
#define SQLCOV_TOYDB_CRASH_H_

#include <string_view>

namespace sqlcov::toydb {

// Installs fatal-signal handlers on an alternate stack. On SIGSEGV, SIGBUS,
// SIGFPE, SIGILL, SIGABRT or SIGTRAP the handler writes
// `$COVRT_CRASH_DIR/crash-<pid>.txt` (signal, registers, frames), posts
// `C <pid> <signal>` on the descriptor named by COVRT_EVENT_FD and re-raises
// the signal with the default action.
//
// Also announces the process on the event descriptor as
// `H <pid> <ppid> <binary>`, now and in every forked child.
void InstallCrashReporter(std::string_view binary_id);

// Prints the failed condition to stderr and aborts.
[[noreturn]] void AssertFail(const char* condition, const char* file, int line);

}  // namespace sqlcov::toydb

#define TOY_ASSERT(cond) \
  ((cond) ? (void)0 : ::sqlcov::toydb::AssertFail(#cond, __FILE__, __LINE__))

#endif  // SQLCOV_TOYDB_CRASH_H_
