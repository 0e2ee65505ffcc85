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

#include "sqlcov/triage/bundle.h"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

#include "sqlcov/common/hash.h"
#include "sqlcov/common/strings.h"

namespace sqlcov::triage {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kDumpMagic = "SQCDUMP1";

void PutLe(std::string& out, uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

uint64_t GetLe(std::string_view in, size_t pos, int bytes) {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

void PutRecord(std::string& out, DumpRecordType type, std::string_view payload) {
  PutLe(out, static_cast<uint16_t>(type), 2);
  PutLe(out, payload.size(), 4);
  out.append(payload);
}

std::string Hex(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string Slurp(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw BundleError("missing " + path.string());
  return ReadFile(path.string());
}

}  // namespace

std::string EncodeDump(const AnomalyEvent& event) {
  std::string out(kDumpMagic);
  std::string process = "pid " + std::to_string(event.pid) + "\nbinary " + event.binary_id +
                        "\nsignal " + std::to_string(event.signal) + "\naddress " +
                        Hex(event.fault_address) + "\n";
  PutRecord(out, DumpRecordType::kProcess, process);
  std::string regs;
  for (const auto& [name, value] : event.registers) regs += name + " " + Hex(value) + "\n";
  PutRecord(out, DumpRecordType::kRegisters, regs);
  std::string frames;
  for (const auto& f : event.stack) frames += Hex(f.pc) + " " + f.Normalized() + "\n";
  PutRecord(out, DumpRecordType::kFrames, frames);

  std::string window;
  size_t begin = 0, end = event.coverage.size();
  if (event.fault_window) {
    begin = std::min<size_t>(event.fault_window->offset, end);
    end = std::min<size_t>(begin + event.fault_window->length, end);
  }
  PutLe(window, begin, 4);
  window.append(reinterpret_cast<const char*>(event.coverage.counters.data()) + begin, end - begin);
  PutRecord(out, DumpRecordType::kCoverageWindow, window);

  std::string_view tail = event.log_tail;
  if (tail.size() > kDumpOutputBytes) tail = tail.substr(tail.size() - kDumpOutputBytes);
  PutRecord(out, DumpRecordType::kOutputTail, tail);
  if (out.size() > kMaxDumpBytes) throw BundleError("dump exceeds 1 MiB");
  return out;
}

std::vector<DumpRecord> DecodeDump(std::string_view bytes) {
  if (bytes.substr(0, kDumpMagic.size()) != kDumpMagic) throw BundleError("bad dump magic");
  std::vector<DumpRecord> out;
  size_t pos = kDumpMagic.size();
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 6) throw BundleError("truncated dump record header");
    auto type = static_cast<uint16_t>(GetLe(bytes, pos, 2));
    auto len = static_cast<size_t>(GetLe(bytes, pos + 2, 4));
    pos += 6;
    if (type < 1 || type > 5) throw BundleError("unknown dump record type");
    if (bytes.size() - pos < len) throw BundleError("truncated dump record");
    out.push_back({static_cast<DumpRecordType>(type), std::string(bytes.substr(pos, len))});
    pos += len;
  }
  return out;
}

std::string FormatStackTrace(const std::vector<StackFrame>& frames) {
  std::string out;
  for (size_t i = 0; i < frames.size(); ++i)
    out += "#" + std::to_string(i) + " " + frames[i].Normalized() + "\n";
  return out;
}

fs::path WriteBundle(const fs::path& dir, const AnomalyEvent& event, const DedupKey& key) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw BundleError("cannot create " + dir.string() + ": " + ec.message());
  try {
    std::string input;
    for (const auto& s : event.input) input += s + ";\n";
    WriteFile((dir / "input.sql").string(), input);
    WriteFile((dir / "stacktrace.txt").string(), FormatStackTrace(event.stack));
    coverage::WriteSnapshotFile((dir / "coverage.snap").string(), event.coverage);
    std::string log = event.log_tail;
    if (!log.empty() && log.back() != '\n') log += '\n';
    log += "== " + event.binary_id + " pid " + std::to_string(event.pid) + " ";
    log += event.kind == AnomalyKind::kTimeout ? std::string("timed out")
                                               : "terminated by " + SignalName(event.signal);
    log += "\n";
    WriteFile((dir / "termination.log").string(), log);
    WriteFile((dir / "dump.bin").string(), EncodeDump(event));

    json meta = {
        {"key", key.Hex()},
        {"stack_digest", Hex64(key.stack_digest)},
        {"coverage_digest", Hex64(key.coverage_digest)},
        {"kind", std::string(AnomalyKindName(event.kind))},
        {"signal", event.signal},
        {"signal_name", SignalName(event.signal)},
        {"binary", event.binary_id},
        {"pid", event.pid},
        {"statement_index", event.statement_index},
        {"frames", event.stack.size()},
        {"statements", event.input},
        {"occurred_at", std::chrono::duration_cast<std::chrono::seconds>(
                            event.occurred_at.time_since_epoch())
                            .count()},
        {"written_at", std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count()},
    };
    WriteFile((dir / kBundleMeta).string(),
              meta.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
  } catch (const BundleError&) {
    throw;
  } catch (const Error& e) {
    throw BundleError(e.what());
  }
  return dir;
}

Bundle ReadBundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw BundleError("not a bundle directory: " + dir.string());
  Bundle b;
  b.dir = dir;
  json meta;
  try {
    meta = json::parse(Slurp(dir / kBundleMeta));
    auto key = DedupKey::FromHex(meta.at("key").get<std::string>());
    if (!key) throw BundleError("bad key in meta.json");
    b.key = *key;
    b.kind = meta.at("kind").get<std::string>();
    b.signal = meta.at("signal").get<int>();
    b.binary_id = meta.at("binary").get<std::string>();
    b.statement_index = meta.at("statement_index").get<size_t>();
    b.statements = meta.at("statements").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw BundleError(std::string("malformed meta.json: ") + e.what());
  }
  b.input = Slurp(dir / "input.sql");
  std::istringstream trace(Slurp(dir / "stacktrace.txt"));
  std::string line;
  while (std::getline(trace, line)) {
    auto sp = line.find(' ');
    if (line.empty() || line[0] != '#' || sp == std::string::npos)
      throw BundleError("malformed stacktrace.txt line: " + line);
    b.stack.push_back(line.substr(sp + 1));
  }
  try {
    b.coverage = coverage::DecodeSnapshot(Slurp(dir / "coverage.snap"));
  } catch (const BundleError&) {
    throw;
  } catch (const Error& e) {
    throw BundleError(std::string("malformed coverage.snap: ") + e.what());
  }
  b.termination_log = Slurp(dir / "termination.log");
  b.dump = DecodeDump(Slurp(dir / "dump.bin"));
  return b;
}

}  // namespace sqlcov::triage
