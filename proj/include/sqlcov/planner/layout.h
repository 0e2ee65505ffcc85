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

#ifndef SQLCOV_PLANNER_LAYOUT_H_
#define SQLCOV_PLANNER_LAYOUT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqlcov/planner/counters.h"

namespace sqlcov::planner {

// Windows are rounded up to a multiple of this many counters so two binaries
// never share a cache line.
inline constexpr uint32_t kWindowAlignment = 64;

struct LayoutEntry {
  std::string binary_id;
  uint32_t offset = 0;
  uint32_t length = 0;

  bool operator==(const LayoutEntry&) const = default;
};

struct GlobalLayout {
  std::vector<LayoutEntry> entries;  // sorted by binary_id
  uint32_t total_length = 0;

  const LayoutEntry* Find(std::string_view binary_id) const;
  bool operator==(const GlobalLayout&) const = default;
};

uint32_t AlignWindow(uint32_t counters);

// Sorts binaries by id and packs their aligned windows back to back.
// Throws PlanError on a duplicate binary id.
GlobalLayout LinkLayouts(std::span<const CounterAssignment> assignments);

// `layout v1 total <N>` followed by `<binaryId> <offset> <length>` lines.
std::string FormatLayout(const GlobalLayout& layout);
// Validates disjointness and exact coverage; throws ParseError otherwise.
GlobalLayout ParseLayout(std::string_view text);

// Best-case mean number of blocks sharing one counter in a fixed-size
// hashed map. Throws PlanError when `counters` is zero.
double EstimateCollisionLoad(uint64_t blocks, uint64_t counters);

// Everything the planner produces for a set of binaries.
struct Plan {
  std::vector<BinaryManifest> split;  // same order as the input
  std::vector<CounterAssignment> assignments;
  GlobalLayout layout;
};

Plan BuildPlan(std::span<const BinaryManifest> manifests);

}  // namespace sqlcov::planner

#endif  // SQLCOV_PLANNER_LAYOUT_H_
