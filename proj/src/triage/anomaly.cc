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

#include "sqlcov/triage/anomaly.h"

#include <cxxabi.h>
#include <signal.h>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <memory>

#include "sqlcov/common/hash.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/sql/lexer.h"

namespace sqlcov::triage {

namespace {

uint64_t ParseNumber(std::string_view text, int base) {
  if (base == 16 && text.substr(0, 2) == "0x") text.remove_prefix(2);
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("bad number '" + std::string(text) + "'", 0, 0);
  return v;
}

std::string Demangle(const std::string& symbol) {
  int status = 0;
  std::unique_ptr<char, decltype(&std::free)> out(
      abi::__cxa_demangle(symbol.c_str(), nullptr, nullptr, &status), &std::free);
  return status == 0 && out ? std::string(out.get()) : symbol;
}

}  // namespace

CrashReport ParseCrashReport(std::string_view text) {
  CrashReport report;
  uint32_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto f = SplitWhitespace(line);
    if (f.empty()) continue;
    try {
      if (f[0] == "pid" && f.size() == 2) {
        report.pid = static_cast<int>(ParseNumber(f[1], 10));
      } else if (f[0] == "binary" && f.size() == 2) {
        report.binary_id = std::string(f[1]);
      } else if (f[0] == "signal" && f.size() == 2) {
        report.signal = static_cast<int>(ParseNumber(f[1], 10));
      } else if (f[0] == "address" && f.size() == 2) {
        report.address = ParseNumber(f[1], 16);
      } else if (f[0] == "reg" && f.size() == 3) {
        report.registers.emplace_back(std::string(f[1]), ParseNumber(f[2], 16));
      } else if (f[0] == "frame" && f.size() == 5) {
        report.frames.push_back({ParseNumber(f[1], 16), std::string(f[2]), std::string(f[3]),
                                 ParseNumber(f[4], 16)});
      } else {
        throw ParseError("unrecognized crash report line", line_no, 1);
      }
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.detail(), line_no, 1);
    }
  }
  if (report.pid == 0 || report.signal == 0)
    throw ParseError("crash report lacks pid or signal", line_no, 1);
  return report;
}

std::string StackFrame::Normalized() const {
  if (!symbol.empty()) return binary_id + "!" + symbol;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(offset));
  return binary_id + "!" + buf;
}

std::vector<StackFrame> NormalizeFrames(const std::vector<RawFrame>& frames,
                                        const std::map<std::string, std::string>& objects) {
  std::vector<StackFrame> out;
  for (const RawFrame& raw : frames) {
    StackFrame f;
    auto it = objects.find(raw.object);
    f.binary_id = it != objects.end() ? it->second : raw.object;
    f.symbol = raw.symbol == "?" ? "" : Demangle(raw.symbol);
    f.pc = raw.pc;
    f.offset = raw.offset;
    out.push_back(std::move(f));
  }
  return out;
}

std::string_view AnomalyKindName(AnomalyKind kind) {
  return kind == AnomalyKind::kCrash ? "crash" : "timeout";
}

std::string SignalName(int signal) {
  switch (signal) {
    case SIGSEGV: return "SIGSEGV";
    case SIGABRT: return "SIGABRT";
    case SIGFPE: return "SIGFPE";
    case SIGBUS: return "SIGBUS";
    case SIGILL: return "SIGILL";
    case SIGTRAP: return "SIGTRAP";
    case SIGKILL: return "SIGKILL";
    case 0: return "none";
    default: return "SIG" + std::to_string(signal);
  }
}

std::string DedupKey::Hex() const { return Hex64(stack_digest) + Hex64(coverage_digest); }

std::optional<DedupKey> DedupKey::FromHex(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  DedupKey key;
  for (int half = 0; half < 2; ++half) {
    uint64_t v = 0;
    auto part = hex.substr(half * 16, 16);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + 16, v, 16);
    if (ec != std::errc() || ptr != part.data() + 16) return std::nullopt;
    (half == 0 ? key.stack_digest : key.coverage_digest) = v;
  }
  if (key.Hex() != hex) return std::nullopt;  // rejects upper case
  return key;
}

std::vector<uint32_t> NovelIndices(const AnomalyEvent& event,
                                   const coverage::CumulativeTable& cumulative) {
  if (event.coverage.size() != cumulative.size())
    throw coverage::LengthMismatch("anomaly coverage length differs from the cumulative table");
  size_t begin = 0, end = event.coverage.size();
  if (event.fault_window) {
    begin = std::min<size_t>(event.fault_window->offset, end);
    end = std::min<size_t>(begin + event.fault_window->length, end);
  }
  std::vector<uint32_t> out;
  for (size_t i = begin; i < end; ++i) {
    if (event.coverage.counters[i] != 0 && cumulative.max_bucket[i] == 0)
      out.push_back(static_cast<uint32_t>(i));
  }
  return out;
}

uint64_t StackDigest(const std::vector<StackFrame>& frames) {
  Fnv1a h;
  for (size_t i = 0; i < frames.size() && i < kStackDigestFrames; ++i)
    h.Update(frames[i].Normalized()).Update(std::string_view("\n"));
  return h.digest();
}

std::string MaskLiterals(std::string_view statement) {
  std::string out;
  for (const auto& t : sql::Lex(statement)) {
    if (!out.empty()) out += ' ';
    if (t.kind == sql::TokenKind::kInteger || t.kind == sql::TokenKind::kString) {
      out += '?';
    } else if (t.kind == sql::TokenKind::kKeyword) {
      out += ToUpper(t.text);
    } else {
      out += t.text;
    }
  }
  return out;
}

DedupKey ComputeDedupKey(const AnomalyEvent& event, const coverage::CumulativeTable& cumulative) {
  DedupKey key;
  if (event.kind == AnomalyKind::kTimeout) {
    key.stack_digest =
        Fnv1a().Update(event.binary_id).Update(std::string_view("\ntimeout")).digest();
    std::string_view last;
    if (event.statement_index < event.input.size()) last = event.input[event.statement_index];
    key.coverage_digest = HashBytes(MaskLiterals(last));
    return key;
  }
  key.stack_digest = StackDigest(event.stack);
  Fnv1a h;
  for (uint32_t i : NovelIndices(event, cumulative)) h.Update(uint64_t{i});
  key.coverage_digest = h.digest();
  return key;
}

}  // namespace sqlcov::triage
