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

#include "sqlcov/coverage/novelty.h"

#include <string>

namespace sqlcov::coverage {

uint8_t Bucket(uint8_t hits) {
  if (hits <= 3) return hits;
  if (hits <= 7) return 4;
  if (hits <= 15) return 5;
  if (hits <= 31) return 6;
  if (hits <= 127) return 7;
  return 8;
}

size_t CumulativeTable::CoveredCount() const {
  size_t n = 0;
  for (uint8_t b : max_bucket) n += b != 0;
  return n;
}

namespace {
void CheckLengths(size_t a, size_t b) {
  if (a != b)
    throw LengthMismatch("snapshot has " + std::to_string(a) +
                         " counters, cumulative table has " + std::to_string(b));
}
}  // namespace

NoveltyReport Classify(const CoverageSnapshot& snapshot,
                       const CumulativeTable& cumulative) {
  CheckLengths(snapshot.size(), cumulative.size());
  NoveltyReport report;
  for (uint32_t i = 0; i < snapshot.size(); ++i) {
    uint8_t b = Bucket(snapshot.counters[i]);
    uint8_t seen = cumulative.max_bucket[i];
    if (b <= seen) continue;
    if (seen == 0)
      report.new_blocks.push_back(i);
    else
      report.new_buckets.emplace_back(i, b);
  }
  return report;
}

size_t UnionInto(CumulativeTable& cumulative, const CoverageSnapshot& snapshot) {
  CheckLengths(snapshot.size(), cumulative.size());
  size_t fresh = 0;
  for (size_t i = 0; i < snapshot.size(); ++i) {
    uint8_t b = Bucket(snapshot.counters[i]);
    uint8_t& seen = cumulative.max_bucket[i];
    if (b > seen) {
      fresh += seen == 0;
      seen = b;
    }
  }
  return fresh;
}

void Accumulate(CoverageSnapshot& into, const CoverageSnapshot& part) {
  if (into.counters.empty()) {
    into = part;
    return;
  }
  CheckLengths(part.size(), into.size());
  for (size_t i = 0; i < part.size(); ++i) {
    unsigned sum = into.counters[i] + part.counters[i];
    into.counters[i] = static_cast<uint8_t>(sum > 255 ? 255 : sum);
  }
  into.timestamp = part.timestamp;
}

}  // namespace sqlcov::coverage
