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

#ifndef SQLCOV_SQL_AST_H_
#define SQLCOV_SQL_AST_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sqlcov::sql {

enum class NodeKind : uint8_t {
  kScript,
  kStatement,
  kClause,
  kExpression,
  kIdentifier,
  kLiteral,
  kKeyword,
};

std::string_view KindName(NodeKind kind);

// Byte offsets into the parsed source.
struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;
};

// A syntax tree node. Keyword tokens (including punctuation) are kept as
// leaf children, so serialization is a walk over the leaves.
//
// `tag` names the production: statements use select, insert, update,
// delete, create_table, drop_table, alter_table and call; clauses use the
// clause name (from, where, ...); list clauses end in `_list` and alternate
// element and `,` children. Identifier tags distinguish expression column
// references ("column") from other names ("name", "function"); literal tags
// are int, string and null in expression position and "count" for LIMIT.
struct Node {
  NodeKind kind = NodeKind::kKeyword;
  std::string tag;
  std::string text;  // leaves only; keywords upper-cased
  std::vector<Node> children;
  Span span;

  bool is_leaf() const {
    return kind == NodeKind::kIdentifier || kind == NodeKind::kLiteral ||
           kind == NodeKind::kKeyword;
  }
  bool is_list() const;
  // True for nodes that can stand wherever an expression is expected.
  bool is_expression() const;
};

struct Ast {
  Node root;  // kScript, children are statements
};

Node MakeKeyword(std::string text);

// Leaves joined by single spaces, except around `(`, `)` and `,`.
// Scripts render each statement followed by `;`.
std::string Serialize(const Node& node);
std::string Serialize(const Ast& ast);
// One text per statement, without the trailing `;`.
std::vector<std::string> SerializeStatements(const Ast& ast);

// Compares kinds, tags, leaf texts and shape; ignores spans.
bool StructurallyEqual(const Node& a, const Node& b);
size_t NodeCount(const Node& node);

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_AST_H_
