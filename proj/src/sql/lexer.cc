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

#include "sqlcov/sql/lexer.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "sqlcov/common/strings.h"

namespace sqlcov::sql {

namespace {

constexpr std::array<std::string_view, 58> kKeywords = {
    // Accepted by the grammar.
    "ADD", "ALTER", "AND", "ASC", "BY", "CALL", "COLUMN", "CREATE", "DELETE",
    "DESC", "DROP", "FROM", "INSERT", "INT", "INTO", "IS", "LIMIT", "NOT",
    "NULL", "OR", "ORDER", "RENAME", "SELECT", "SET", "TABLE", "TEXT", "TO",
    "UPDATE", "VALUES", "WHERE",
    // Reserved but not part of the supported subset.
    "AS", "BEGIN", "BETWEEN", "CASE", "COMMIT", "DISTINCT", "ELSE", "END",
    "EXISTS", "GROUP", "HAVING", "IN", "INDEX", "INNER", "JOIN", "KEY", "LEFT",
    "LIKE", "ON", "OUTER", "PRIMARY", "ROLLBACK", "THEN", "TRUNCATE", "UNION",
    "UNIQUE", "VIEW", "WHEN"};

bool IsWordStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

size_t Utf8Length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xe0) == 0xc0) return 2;
  if ((lead & 0xf0) == 0xe0) return 3;
  if ((lead & 0xf8) == 0xf0) return 4;
  return 1;
}

}  // namespace

std::span<const std::string_view> Keywords() { return kKeywords; }

bool IsKeyword(std::string_view word) {
  if (word.empty() || word.size() > 10) return false;
  std::string upper = ToUpper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), upper) != kKeywords.end();
}

std::vector<Token> Lex(std::string_view sql) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = sql.size();
  auto push = [&](TokenKind kind, size_t start, size_t end, bool complete = true) {
    out.push_back({kind, sql.substr(start, end - start), static_cast<uint32_t>(start), complete});
  };
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
      while (i < n && sql[i] != '\n') ++i;
      continue;
    }
    size_t start = i;
    if (IsWordStart(c)) {
      while (i < n && IsWordChar(sql[i])) ++i;
      push(IsKeyword(sql.substr(start, i - start)) ? TokenKind::kKeyword
                                                   : TokenKind::kIdentifier,
           start, i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
      push(TokenKind::kInteger, start, i);
    } else if (c == '\'') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == '\'') {
          if (i + 1 < n && sql[i + 1] == '\'') {
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        i += Utf8Length(static_cast<unsigned char>(sql[i]));
      }
      i = std::min(i, n);
      push(TokenKind::kString, start, i, closed);
    } else {
      static constexpr std::string_view kTwo[] = {"<>", "<=", ">=", "!=", "||"};
      bool matched = false;
      for (auto two : kTwo) {
        if (sql.substr(i, 2) == two) {
          i += 2;
          push(TokenKind::kSymbol, start, i);
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string_view("(),;*+-/%=<>.").find(c) != std::string_view::npos) {
        ++i;
        push(TokenKind::kSymbol, start, i);
      } else {
        i = std::min(n, i + Utf8Length(static_cast<unsigned char>(c)));
        push(TokenKind::kUnknown, start, i);
      }
    }
  }
  return out;
}

std::vector<std::string> SplitStatements(std::string_view sql) {
  std::vector<std::string> out;
  size_t start = 0;
  auto flush = [&](size_t end) {
    auto piece = Trim(sql.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
  };
  for (const auto& tok : Lex(sql)) {
    if (tok.kind == TokenKind::kSymbol && tok.text == ";") {
      flush(tok.offset);
      start = tok.offset + 1;
    }
  }
  flush(sql.size());
  return out;
}

std::string JoinStatements(const std::vector<std::string>& statements) {
  std::string out;
  for (const auto& s : statements) {
    if (!out.empty()) out += ' ';
    out += s;
    out += ';';
  }
  return out;
}

}  // namespace sqlcov::sql
