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

#ifndef SQLCOV_SQL_LEXER_H_
#define SQLCOV_SQL_LEXER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sqlcov::sql {

enum class TokenKind : uint8_t {
  kKeyword,
  kIdentifier,
  kInteger,
  kString,
  kSymbol,
  kUnknown,
};

// Token text views into the lexed source.
struct Token {
  TokenKind kind;
  std::string_view text;
  uint32_t offset = 0;
  bool complete = true;  // false for an unterminated string literal
};

// Never fails: bytes that start no valid token become kUnknown tokens, one
// UTF-8 sequence each, so re-joining tokens keeps the text valid UTF-8.
// `--` comments and whitespace are dropped.
std::vector<Token> Lex(std::string_view sql);

// Case-insensitive; covers the grammar's keywords plus reserved words the
// grammar does not accept (UNION, JOIN, ...).
bool IsKeyword(std::string_view word);

// Every keyword, upper-cased.
std::span<const std::string_view> Keywords();

// Splits on top-level `;` tokens, trimming whitespace and dropping empty
// statements. Semicolons inside string literals do not split.
std::vector<std::string> SplitStatements(std::string_view sql);

// Joins statements as `s1; s2;`.
std::string JoinStatements(const std::vector<std::string>& statements);

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_LEXER_H_
