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

#ifndef SQLCOV_TRIAGE_REGISTRY_H_
#define SQLCOV_TRIAGE_REGISTRY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "sqlcov/coverage/novelty.h"
#include "sqlcov/triage/anomaly.h"

namespace sqlcov::triage {

struct RegistryEntry {
  uint64_t count = 0;
  int64_t first_seen = 0;  // unix seconds

  bool operator==(const RegistryEntry&) const = default;
};

// Known dedup keys. The file is appended to on every update and compacted
// to one line per key by Compact(); on load the last line for a key wins.
class Registry {
 public:
  Registry() = default;
  // Missing file: empty registry bound to `path`.
  static Registry Load(const std::filesystem::path& path);

  // Returns the count after recording.
  uint64_t Record(const DedupKey& key, int64_t now);
  void Compact() const;

  bool Contains(const DedupKey& key) const { return entries_.count(key) != 0; }
  uint64_t Count(const DedupKey& key) const;
  const std::map<DedupKey, RegistryEntry>& entries() const { return entries_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::map<DedupKey, RegistryEntry> entries_;
};

enum class Verdict : uint8_t { kNew, kDuplicate };

struct TriageOutcome {
  Verdict verdict = Verdict::kNew;
  DedupKey key;
  std::filesystem::path bundle;  // empty for duplicates
  uint64_t count = 0;
};

// Registry lives at <reports>/registry.txt, bundles at
// <reports>/<session>/<key-hex>/.
class Triager {
 public:
  Triager(std::filesystem::path reports_dir, std::string session);
  ~Triager();
  Triager(const Triager&) = delete;
  Triager& operator=(const Triager&) = delete;

  TriageOutcome Triage(const AnomalyEvent& event, const coverage::CumulativeTable& cumulative);

  const Registry& registry() const { return registry_; }
  std::filesystem::path session_dir() const { return reports_dir_ / session_; }
  uint64_t bundles_written() const { return bundles_written_; }
  uint64_t dumps_suppressed() const { return dumps_suppressed_; }

 private:
  std::filesystem::path reports_dir_;
  std::string session_;
  Registry registry_;
  uint64_t bundles_written_ = 0;
  uint64_t dumps_suppressed_ = 0;
};

}  // namespace sqlcov::triage

#endif  // SQLCOV_TRIAGE_REGISTRY_H_
