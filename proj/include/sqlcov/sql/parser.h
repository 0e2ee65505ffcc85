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

#ifndef SQLCOV_SQL_PARSER_H_
#define SQLCOV_SQL_PARSER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlcov/common/error.h"
#include "sqlcov/sql/ast.h"

namespace sqlcov::sql {

class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& message, uint32_t line, uint32_t column,
              uint32_t offset)
      : ParseError(message, line, column), offset_(offset) {}
  uint32_t offset() const { return offset_; }

 private:
  uint32_t offset_;
};

// Expression nesting beyond this depth is a syntax error.
inline constexpr int kMaxNesting = 96;

struct Diagnostic {
  std::string message;
  uint32_t line = 0;
  uint32_t column = 0;
};

// What a recovering parse salvages: every statement that parses, and for
// statements that do not, every clause (FROM, WHERE, ORDER BY, LIMIT, SET,
// VALUES) that does.
struct PartialParse {
  std::vector<Node> subtrees;
  std::vector<Diagnostic> diagnostics;
};

enum class ParseMode { kStrict, kRecovering };

// Throws SyntaxError. The empty script is an error.
Ast ParseStrict(std::string_view sql);
// Never throws.
PartialParse ParseRecovering(std::string_view sql);

std::variant<Ast, PartialParse> Parse(std::string_view sql, ParseMode mode);

// Parses `text` as exactly one instance of the nonterminal `tag`: any
// statement tag, one of the recoverable clause tags, or "expression".
Node ParseAs(std::string_view tag, std::string_view text);

// Clause placement rules used by the mutator.
bool StatementAcceptsClause(std::string_view statement, std::string_view clause);
// Position rank used to insert a missing clause; lower comes first.
int ClauseRank(std::string_view clause);
bool IsOptionalClause(std::string_view statement, std::string_view clause);

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_PARSER_H_
