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

#include "sqlcov/planner/cfg.h"

#include <algorithm>

namespace sqlcov::planner {

std::vector<Edge> FindCriticalEdges(const FunctionCfg& cfg) {
  std::vector<uint32_t> succ(cfg.blocks.size()), pred(cfg.blocks.size());
  for (const auto& e : cfg.edges) {
    ++succ[e.src];
    ++pred[e.dst];
  }
  std::vector<Edge> out;
  for (const auto& e : cfg.edges)
    if (succ[e.src] > 1 && pred[e.dst] > 1) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::string DummyBlockName(std::string_view src, std::string_view dst) {
  std::string name;
  name.reserve(src.size() + dst.size() + 2 + kDummyMarker.size());
  name.append(src).append("->").append(dst).append(kDummyMarker);
  return name;
}

FunctionCfg SplitCriticalEdges(const FunctionCfg& cfg) {
  const auto critical = FindCriticalEdges(cfg);
  if (critical.empty()) return cfg;
  FunctionCfg out = cfg;
  std::vector<Edge> tails;
  for (const auto& ce : critical) {
    auto dummy = static_cast<uint32_t>(out.blocks.size());
    out.blocks.push_back(DummyBlockName(cfg.blocks[ce.src], cfg.blocks[ce.dst]));
    auto it = std::find(out.edges.begin(), out.edges.end(), ce);
    it->dst = dummy;
    tails.push_back({dummy, ce.dst});
  }
  out.edges.insert(out.edges.end(), tails.begin(), tails.end());
  return out;
}

BinaryManifest SplitCriticalEdges(const BinaryManifest& manifest) {
  BinaryManifest out{manifest.binary_id, {}};
  out.functions.reserve(manifest.functions.size());
  for (const auto& f : manifest.functions)
    out.functions.push_back(SplitCriticalEdges(f));
  return out;
}

}  // namespace sqlcov::planner
