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

#include "sqlcov/triage/registry.h"

#include <charconv>
#include <fstream>

#include "sqlcov/common/strings.h"
#include "sqlcov/triage/bundle.h"

namespace sqlcov::triage {

namespace fs = std::filesystem;

namespace {

std::string FormatLine(const DedupKey& key, const RegistryEntry& e) {
  return key.Hex() + " " + std::to_string(e.count) + " " + std::to_string(e.first_seen) + "\n";
}

template <typename T>
bool ParseInt(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Registry Registry::Load(const fs::path& path) {
  Registry r;
  r.path_ = path;
  if (!fs::exists(path)) return r;
  std::string text = ReadFile(path.string());
  uint32_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto f = SplitWhitespace(line);
    if (f.empty()) continue;
    RegistryEntry e;
    auto key = f.size() == 3 ? DedupKey::FromHex(f[0]) : std::nullopt;
    if (!key || !ParseInt(f[1], e.count) || !ParseInt(f[2], e.first_seen) || e.count == 0)
      throw ParseError("malformed registry line", line_no, 1);
    r.entries_[*key] = e;
  }
  return r;
}

uint64_t Registry::Record(const DedupKey& key, int64_t now) {
  auto [it, inserted] = entries_.try_emplace(key, RegistryEntry{0, now});
  ++it->second.count;
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << FormatLine(key, it->second);
    if (!out) throw Error("cannot append to " + path_.string());
  }
  return it->second.count;
}

void Registry::Compact() const {
  if (path_.empty()) return;
  std::string text;
  for (const auto& [key, e] : entries_) text += FormatLine(key, e);
  fs::path tmp = path_;
  tmp += ".tmp";
  WriteFile(tmp.string(), text);
  fs::rename(tmp, path_);
}

uint64_t Registry::Count(const DedupKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.count;
}

Triager::Triager(fs::path reports_dir, std::string session)
    : reports_dir_(std::move(reports_dir)), session_(std::move(session)) {
  fs::create_directories(reports_dir_ / session_);
  registry_ = Registry::Load(reports_dir_ / "registry.txt");
}

Triager::~Triager() {
  try {
    registry_.Compact();
  } catch (const std::exception&) {
    // The appended log is still complete.
  }
}

TriageOutcome Triager::Triage(const AnomalyEvent& event,
                              const coverage::CumulativeTable& cumulative) {
  TriageOutcome out;
  out.key = ComputeDedupKey(event, cumulative);
  const int64_t now = std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
  if (registry_.Contains(out.key)) {
    out.verdict = Verdict::kDuplicate;
    ++dumps_suppressed_;
    out.count = registry_.Record(out.key, now);
    return out;
  }
  // The bundle must exist before the key becomes visible as known.
  const fs::path dir = session_dir() / out.key.Hex();
  try {
    WriteBundle(dir, event, out.key);
  } catch (const BundleError&) {
    fs::remove_all(dir);
    WriteBundle(dir, event, out.key);
  }
  ++bundles_written_;
  out.verdict = Verdict::kNew;
  out.bundle = dir;
  out.count = registry_.Record(out.key, now);
  return out;
}

}  // namespace sqlcov::triage
