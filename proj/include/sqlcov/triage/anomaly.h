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

#ifndef SQLCOV_TRIAGE_ANOMALY_H_
#define SQLCOV_TRIAGE_ANOMALY_H_

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/coverage/novelty.h"
#include "sqlcov/coverage/snapshot.h"
#include "sqlcov/planner/layout.h"

namespace sqlcov::triage {

// What the in-process reporter of a crashing target writes.
struct RawFrame {
  uint64_t pc = 0;
  std::string object;  // file name of the mapped object, "?" if unknown
  std::string symbol;  // mangled, "?" if unknown
  uint64_t offset = 0;  // from the symbol, or from the object base
};

struct CrashReport {
  int pid = 0;
  std::string binary_id;
  int signal = 0;
  uint64_t address = 0;
  std::vector<std::pair<std::string, uint64_t>> registers;
  std::vector<RawFrame> frames;
};

CrashReport ParseCrashReport(std::string_view text);

struct StackFrame {
  std::string binary_id;
  std::string symbol;  // demangled; empty when unknown
  uint64_t pc = 0;
  uint64_t offset = 0;

  // `binary!symbol`, or `binary!0x<offset>` without a symbol.
  std::string Normalized() const;
};

// Maps object file names to binary ids (e.g. toydb_query -> query) and
// demangles symbols.
std::vector<StackFrame> NormalizeFrames(const std::vector<RawFrame>& frames,
                                        const std::map<std::string, std::string>& objects);

enum class AnomalyKind : uint8_t { kCrash, kTimeout };

std::string_view AnomalyKindName(AnomalyKind kind);
std::string SignalName(int signal);

struct AnomalyEvent {
  AnomalyKind kind = AnomalyKind::kCrash;
  int pid = 0;
  std::string binary_id;
  int signal = 0;
  uint64_t fault_address = 0;
  std::vector<std::pair<std::string, uint64_t>> registers;
  std::vector<StackFrame> stack;
  // Coverage of the statement in flight when the anomaly happened.
  coverage::CoverageSnapshot coverage;
  // Layout window of the faulting binary; novelty is computed inside it.
  std::optional<planner::LayoutEntry> fault_window;
  std::string log_tail;
  std::vector<std::string> input;
  size_t statement_index = 0;
  std::chrono::system_clock::time_point occurred_at{};
};

inline constexpr size_t kStackDigestFrames = 5;

struct DedupKey {
  uint64_t stack_digest = 0;
  uint64_t coverage_digest = 0;

  std::string Hex() const;  // 32 lowercase hex digits
  static std::optional<DedupKey> FromHex(std::string_view hex);
  auto operator<=>(const DedupKey&) const = default;
};

// Indices covered by the event (inside its fault window, when set) whose
// bucket is zero in `cumulative`.
std::vector<uint32_t> NovelIndices(const AnomalyEvent& event,
                                   const coverage::CumulativeTable& cumulative);

uint64_t StackDigest(const std::vector<StackFrame>& frames);
// Statement text with literals replaced by '?'.
std::string MaskLiterals(std::string_view statement);

DedupKey ComputeDedupKey(const AnomalyEvent& event, const coverage::CumulativeTable& cumulative);

}  // namespace sqlcov::triage

#endif  // SQLCOV_TRIAGE_ANOMALY_H_
