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

#include "sqlcov/fuzz/corpus.h"

#include <algorithm>

namespace sqlcov::fuzz {

uint64_t Corpus::Add(sql::TestCase test_case, std::vector<uint32_t> signature, bool seed,
                     uint32_t energy) {
  CorpusEntry entry;
  entry.id = next_id_++;
  entry.test_case = std::move(test_case);
  entry.signature = std::move(signature);
  entry.energy = energy == 0 ? base_energy_ : energy;
  entry.remaining = entry.energy;
  entry.seed = seed;
  entry.discovered_at = std::chrono::system_clock::now();
  entries_.push_back(std::move(entry));
  return entries_.back().id;
}

const CorpusEntry& Corpus::PickNext() {
  if (entries_.empty()) throw Error("pickNext on an empty corpus");
  if (!current_ || entries_[*current_].remaining == 0) {
    auto best = [&] {
      size_t pick = entries_.size() - 1;
      for (size_t i = entries_.size(); i-- > 0;)
        if (entries_[i].remaining > entries_[pick].remaining) pick = i;
      return pick;
    };
    size_t pick = best();
    if (entries_[pick].remaining == 0) {
      for (auto& e : entries_) e.remaining = std::max(base_energy_, 1u);
      pick = best();
    }
    current_ = pick;
  }
  CorpusEntry& entry = entries_[*current_];
  --entry.remaining;
  return entry;
}

const CorpusEntry* Corpus::Find(uint64_t id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const CorpusEntry& e, uint64_t v) { return e.id < v; });
  return it != entries_.end() && it->id == id ? &*it : nullptr;
}

}  // namespace sqlcov::fuzz
