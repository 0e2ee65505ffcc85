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

#ifndef SQLCOV_SQL_MUTATOR_H_
#define SQLCOV_SQL_MUTATOR_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sqlcov/common/rng.h"
#include "sqlcov/sql/ast.h"
#include "sqlcov/sql/dictionary.h"
#include "sqlcov/sql/fragments.h"

namespace sqlcov::sql {

struct MutationOptions {
  int max_ops = 4;
  // An operator that would grow the tree past this many nodes is undone.
  size_t max_nodes = 4000;
  size_t max_list_elements = 32;
  size_t max_statements = 12;
  // Extra candidates for function-name substitution.
  std::vector<std::string> function_names;
};

// Applies 1..max_ops operators, each chosen among splicing a pooled subtree
// of the same kind, deleting an optional child, duplicating a list element
// or statement, and mutating a literal, name or operator. Every operator
// keeps the tree inside the grammar, except that nesting may exceed the
// parser's depth limit. Without pooled fragments splicing is skipped.
Ast MutateAst(const Ast& ast, const FragmentPool& pool, Rng& rng,
              const MutationOptions& options = {});

// Token-level mutation: 1..4 of replace-with-entry, insert-entry, delete and
// swap-adjacent over the lexer's tokens, rejoined with single spaces.
// Throws Error when `dict` is empty.
std::string DictionaryMutate(std::string_view text, const Dictionary& dict, Rng& rng);

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_MUTATOR_H_
