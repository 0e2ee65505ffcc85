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

#ifndef SQLCOV_TESTS_SUPPORT_CFG_ORACLE_H_
#define SQLCOV_TESTS_SUPPORT_CFG_ORACLE_H_

// Independent reference computations over CFGs. Nothing in here calls the
// planner's own analysis routines.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sqlcov/common/rng.h"
#include "sqlcov/planner/manifest.h"

namespace sqlcov::testing {

// Adjacency-matrix based critical edge count.
inline std::set<std::pair<uint32_t, uint32_t>> BruteForceCriticalEdges(
    const planner::FunctionCfg& cfg) {
  const size_t n = cfg.blocks.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& e : cfg.edges) adj[e.src][e.dst] = true;
  std::set<std::pair<uint32_t, uint32_t>> out;
  for (uint32_t u = 0; u < n; ++u) {
    for (uint32_t v = 0; v < n; ++v) {
      if (!adj[u][v]) continue;
      size_t out_deg = 0, in_deg = 0;
      for (size_t k = 0; k < n; ++k) {
        out_deg += adj[u][k];
        in_deg += adj[k][v];
      }
      if (out_deg > 1 && in_deg > 1) out.insert({u, v});
    }
  }
  return out;
}

inline planner::FunctionCfg RandomCfg(Rng& rng, uint32_t max_blocks,
                                      const std::string& name = "f") {
  planner::FunctionCfg cfg;
  cfg.name = name;
  uint32_t n = 1 + static_cast<uint32_t>(Below(rng, max_blocks));
  for (uint32_t i = 0; i < n; ++i) cfg.blocks.push_back("b" + std::to_string(i));
  cfg.entry = static_cast<uint32_t>(Below(rng, n));
  // Sparse-ish random digraph, self loops allowed.
  uint64_t density = 2 + Below(rng, 4);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = 0; v < n; ++v)
      if (Below(rng, n * density / 2 + 1) == 0) cfg.edges.push_back({u, v});
  return cfg;
}

struct PathAudit {
  size_t paths = 0;
  size_t violations = 0;  // multiset collisions with differing edge use
  size_t invalid_projections = 0;
};

// Enumerates entry-to-exit paths of `split` (each edge used at most twice,
// at most `cap` paths), projects each onto `original` by dropping blocks
// that are not present there, and checks that the multiset of split blocks
// visited determines how often each former critical edge was traversed.
inline PathAudit AuditEdgeRecoverability(const planner::FunctionCfg& original,
                                         const planner::FunctionCfg& split,
                                         size_t cap = 4000) {
  const auto critical = BruteForceCriticalEdges(original);
  std::map<std::string, uint32_t> original_index;
  for (uint32_t i = 0; i < original.blocks.size(); ++i)
    original_index[original.blocks[i]] = i;
  std::set<std::pair<uint32_t, uint32_t>> original_edges;
  for (const auto& e : original.edges) original_edges.insert({e.src, e.dst});

  const size_t n = split.blocks.size();
  std::vector<std::vector<uint32_t>> succ(n);
  for (const auto& e : split.edges) succ[e.src].push_back(e.dst);
  std::map<std::pair<uint32_t, uint32_t>, int> edge_use;

  PathAudit audit;
  std::map<std::vector<uint32_t>, std::map<std::pair<uint32_t, uint32_t>, int>> seen;
  std::vector<uint32_t> path{split.entry};

  auto check = [&]() {
    ++audit.paths;
    std::vector<uint32_t> multiset(n, 0);
    for (uint32_t b : path) ++multiset[b];
    std::vector<uint32_t> projected;
    for (uint32_t b : path) {
      auto it = original_index.find(split.blocks[b]);
      if (it != original_index.end()) projected.push_back(it->second);
    }
    std::map<std::pair<uint32_t, uint32_t>, int> crit_use;
    for (size_t i = 0; i + 1 < projected.size(); ++i) {
      std::pair<uint32_t, uint32_t> e{projected[i], projected[i + 1]};
      if (!original_edges.count(e)) ++audit.invalid_projections;
      if (critical.count(e)) ++crit_use[e];
    }
    auto [it, fresh] = seen.emplace(multiset, crit_use);
    if (!fresh && it->second != crit_use) ++audit.violations;
  };

  auto dfs = [&](auto&& self, uint32_t u) -> void {
    if (audit.paths >= cap) return;
    if (succ[u].empty()) {
      check();
      return;
    }
    for (uint32_t v : succ[u]) {
      int& used = edge_use[{u, v}];
      if (used >= 2) continue;
      ++used;
      path.push_back(v);
      self(self, v);
      path.pop_back();
      --used;
    }
  };
  dfs(dfs, split.entry);
  return audit;
}

}  // namespace sqlcov::testing

#endif  // SQLCOV_TESTS_SUPPORT_CFG_ORACLE_H_
