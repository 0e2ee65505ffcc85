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

#ifndef SQLCOV_TOYDB_TREE_H_
#define SQLCOV_TOYDB_TREE_H_

#include <string_view>
#include <vector>

#include "sqlcov/sql/ast.h"

namespace sqlcov::toydb {

inline const sql::Node* FindChild(const sql::Node& n, std::string_view tag) {
  for (const auto& c : n.children)
    if (c.tag == tag) return &c;
  return nullptr;
}

// Elements of a comma separated list node.
inline std::vector<const sql::Node*> Elements(const sql::Node& list) {
  std::vector<const sql::Node*> out;
  for (size_t i = 0; i < list.children.size(); i += 2) out.push_back(&list.children[i]);
  return out;
}

}  // namespace sqlcov::toydb

#endif  // SQLCOV_TOYDB_TREE_H_
