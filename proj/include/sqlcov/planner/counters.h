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

#ifndef SQLCOV_PLANNER_COUNTERS_H_
#define SQLCOV_PLANNER_COUNTERS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlcov/planner/manifest.h"

namespace sqlcov::planner {

class PlanError : public Error {
 public:
  using Error::Error;
};

// Bijective block -> counter mapping for one binary. Counters are dense in
// [0, total_counters).
struct CounterAssignment {
  std::string binary_id;
  std::map<BlockId, uint32_t> mapping;
  std::vector<BlockId> blocks;  // inverse: counter -> block
  uint32_t total_counters = 0;

  std::optional<uint32_t> CounterOf(const BlockId& block) const;
  const BlockId& BlockOf(uint32_t counter) const { return blocks.at(counter); }
};

// Counters follow declaration order: functions in order, then each
// function's blocks in order. Dummy blocks sit at the end of their
// function's list, so they follow that function's original blocks.
// Throws PlanError if a critical edge survives (split first) or a BlockId
// repeats.
CounterAssignment AssignCounters(const BinaryManifest& split_manifest);

}  // namespace sqlcov::planner

#endif  // SQLCOV_PLANNER_COUNTERS_H_
