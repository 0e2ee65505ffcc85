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

#include "sqlcov/planner/counters.h"

#include "sqlcov/planner/cfg.h"

namespace sqlcov::planner {

std::optional<uint32_t> CounterAssignment::CounterOf(
    const BlockId& block) const {
  auto it = mapping.find(block);
  if (it == mapping.end()) return std::nullopt;
  return it->second;
}

CounterAssignment AssignCounters(const BinaryManifest& split_manifest) {
  CounterAssignment out;
  out.binary_id = split_manifest.binary_id;
  for (size_t f = 0; f < split_manifest.functions.size(); ++f) {
    const auto& fn = split_manifest.functions[f];
    if (!FindCriticalEdges(fn).empty())
      throw PlanError("function '" + fn.name +
                      "' still has critical edges; split before assigning");
    for (uint32_t b = 0; b < fn.blocks.size(); ++b) {
      BlockId id = split_manifest.Block(f, b);
      auto counter = static_cast<uint32_t>(out.blocks.size());
      if (!out.mapping.emplace(id, counter).second)
        throw PlanError("duplicate block id " + id.binary + ":" + id.function +
                        ":" + std::to_string(id.index));
      out.blocks.push_back(std::move(id));
    }
  }
  out.total_counters = static_cast<uint32_t>(out.blocks.size());
  return out;
}

}  // namespace sqlcov::planner
