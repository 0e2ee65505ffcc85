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

#ifndef SQLCOV_PLANNER_CFG_H_
#define SQLCOV_PLANNER_CFG_H_

#include <string>
#include <string_view>
#include <vector>

#include "sqlcov/planner/manifest.h"

namespace sqlcov::planner {

// Edges (u, v) where u has more than one successor and v more than one
// predecessor, ordered by (src, dst) block index.
std::vector<Edge> FindCriticalEdges(const FunctionCfg& cfg);

// Name given to the dummy block that splits src->dst.
std::string DummyBlockName(std::string_view src, std::string_view dst);

// Replaces each critical edge u->v with u->d, d->v for a fresh dummy block d
// appended after the existing blocks. The u->d edge keeps the position of
// u->v in the edge list; d->v edges are appended in critical-edge order.
FunctionCfg SplitCriticalEdges(const FunctionCfg& cfg);

BinaryManifest SplitCriticalEdges(const BinaryManifest& manifest);

}  // namespace sqlcov::planner

#endif  // SQLCOV_PLANNER_CFG_H_
