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

#ifndef SQLCOV_TRIAGE_BUNDLE_H_
#define SQLCOV_TRIAGE_BUNDLE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/coverage/snapshot.h"
#include "sqlcov/triage/anomaly.h"

namespace sqlcov::triage {

class BundleError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kBundleFiles[] = {"input.sql", "stacktrace.txt", "coverage.snap",
                                               "termination.log", "dump.bin"};
inline constexpr const char* kBundleMeta = "meta.json";
inline constexpr size_t kMaxDumpBytes = 1 << 20;
inline constexpr size_t kDumpOutputBytes = 64 * 1024;

enum class DumpRecordType : uint16_t {
  kProcess = 1,
  kRegisters = 2,
  kFrames = 3,
  kCoverageWindow = 4,
  kOutputTail = 5,
};

struct DumpRecord {
  DumpRecordType type;
  std::string payload;
};

// Small stand-in for a core dump: faulting registers and frames, the
// coverage window of the faulting binary and the last output bytes.
std::string EncodeDump(const AnomalyEvent& event);
std::vector<DumpRecord> DecodeDump(std::string_view bytes);

std::string FormatStackTrace(const std::vector<StackFrame>& frames);

// Writes <dir>/ with the five artifacts plus meta.json. Returns `dir`.
std::filesystem::path WriteBundle(const std::filesystem::path& dir, const AnomalyEvent& event,
                                  const DedupKey& key);

struct Bundle {
  std::filesystem::path dir;
  DedupKey key;
  std::string kind;
  int signal = 0;
  std::string binary_id;
  size_t statement_index = 0;
  std::string input;
  std::vector<std::string> statements;  // as sent, one per element
  std::vector<std::string> stack;  // normalized frames, top first
  coverage::CoverageSnapshot coverage;
  std::string termination_log;
  std::vector<DumpRecord> dump;
};

// Throws BundleError when an artifact is missing or malformed.
Bundle ReadBundle(const std::filesystem::path& dir);

}  // namespace sqlcov::triage

#endif  // SQLCOV_TRIAGE_BUNDLE_H_
