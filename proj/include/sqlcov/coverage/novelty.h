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

#ifndef SQLCOV_COVERAGE_NOVELTY_H_
#define SQLCOV_COVERAGE_NOVELTY_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/coverage/snapshot.h"

namespace sqlcov::coverage {

// Hit-count classes: 0, 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128-255 map to
// buckets 0..8.
uint8_t Bucket(uint8_t hits);

// Highest bucket observed so far at each global counter index.
struct CumulativeTable {
  std::vector<uint8_t> max_bucket;

  CumulativeTable() = default;
  explicit CumulativeTable(size_t length) : max_bucket(length, 0) {}
  size_t size() const { return max_bucket.size(); }
  // Indices whose bucket is nonzero.
  size_t CoveredCount() const;
};

struct NoveltyReport {
  std::vector<uint32_t> new_blocks;  // first time nonzero
  // (index, bucket) for already-covered indices whose bucket went up.
  std::vector<std::pair<uint32_t, uint8_t>> new_buckets;

  bool interesting() const { return !new_blocks.empty() || !new_buckets.empty(); }
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// Does not modify the table.
NoveltyReport Classify(const CoverageSnapshot& snapshot,
                       const CumulativeTable& cumulative);

// Raises each index to max(bucket) and returns how many went 0 -> nonzero.
size_t UnionInto(CumulativeTable& cumulative, const CoverageSnapshot& snapshot);

// Saturating per-counter sum; used to fold several per-statement snapshots
// into one per-input snapshot.
void Accumulate(CoverageSnapshot& into, const CoverageSnapshot& part);

}  // namespace sqlcov::coverage

#endif  // SQLCOV_COVERAGE_NOVELTY_H_
