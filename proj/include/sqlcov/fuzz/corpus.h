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

#ifndef SQLCOV_FUZZ_CORPUS_H_
#define SQLCOV_FUZZ_CORPUS_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/sql/generator.h"

namespace sqlcov::fuzz {

struct CorpusEntry {
  uint64_t id = 0;
  sql::TestCase test_case;
  // Global indices covered when the entry was admitted.
  std::vector<uint32_t> signature;
  uint32_t energy = 1;     // picks granted per round
  uint32_t remaining = 0;  // picks left in the current round
  bool seed = false;
  std::chrono::system_clock::time_point discovered_at{};
};

// Schedules entries energy-first: the entry being consumed keeps the floor
// until its round is spent, then the entry with the most remaining picks
// goes next, newest first on ties. When every entry is spent all of them
// start a new round with the base energy.
class Corpus {
 public:
  explicit Corpus(uint32_t base_energy = 8) : base_energy_(base_energy) {}

  // Returns the new entry's id. `energy` of zero means the base energy.
  uint64_t Add(sql::TestCase test_case, std::vector<uint32_t> signature, bool seed,
               uint32_t energy = 0);
  // Throws Error on an empty corpus.
  const CorpusEntry& PickNext();

  const CorpusEntry* Find(uint64_t id) const;
  const std::vector<CorpusEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  uint32_t base_energy() const { return base_energy_; }
  // Energy given to admitted (non-seed) entries.
  uint32_t favored_energy() const { return base_energy_ * 2; }

 private:
  uint32_t base_energy_;
  uint64_t next_id_ = 1;
  std::vector<CorpusEntry> entries_;  // ascending id
  std::optional<size_t> current_;
};

}  // namespace sqlcov::fuzz

#endif  // SQLCOV_FUZZ_CORPUS_H_
