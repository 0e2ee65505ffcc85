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

#ifndef SQLCOV_COVERAGE_SNAPSHOT_H_
#define SQLCOV_COVERAGE_SNAPSHOT_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sqlcov::coverage {

// Point-in-time copy of a coverage region.
struct CoverageSnapshot {
  std::vector<uint8_t> counters;
  std::chrono::steady_clock::time_point timestamp{};

  size_t size() const { return counters.size(); }
  // Global indices with a nonzero counter, ascending.
  std::vector<uint32_t> CoveredIndices() const;
};

// Raw little-endian bytes behind a `COVSNAPv1 <length>\n` header. The length
// is zero-padded to five digits so the header is 16 bytes whenever the
// snapshot has at most 99999 counters; longer snapshots get a longer header.
std::string EncodeSnapshot(const CoverageSnapshot& snapshot);
CoverageSnapshot DecodeSnapshot(std::string_view bytes);

void WriteSnapshotFile(const std::string& path, const CoverageSnapshot& snapshot);
CoverageSnapshot ReadSnapshotFile(const std::string& path);

}  // namespace sqlcov::coverage

#endif  // SQLCOV_COVERAGE_SNAPSHOT_H_
