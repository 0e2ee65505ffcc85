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

#ifndef SQLCOV_TOYDB_VALUE_H_
#define SQLCOV_TOYDB_VALUE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sqlcov::toydb {

enum class ColumnType : uint8_t { kInt, kText };

struct Column {
  std::string name;
  ColumnType type;
};

std::optional<ColumnType> ParseColumnType(std::string_view keyword);

// NULL, INT or TEXT.
using Value = std::variant<std::monostate, int64_t, std::string>;
using Row = std::vector<Value>;

inline bool IsNull(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// NULL sorts first, then integers, then text.
int CompareValues(const Value& a, const Value& b);

// Rows as CSV lines; NULL renders as `NULL`.
std::string FormatRows(const std::vector<Row>& rows);

// Digits only; nullopt when the value does not fit in int64.
std::optional<int64_t> ParseIntLiteral(std::string_view digits);
// Strips the quotes and undoubles embedded quotes.
std::string UnquoteString(std::string_view literal);

// Resource guardrails shared by the query server and the storage worker.
inline constexpr size_t kMaxTables = 64;
inline constexpr size_t kMaxColumns = 64;
inline constexpr size_t kMaxRows = 10000;
inline constexpr size_t kMaxTextLength = 4096;

}  // namespace sqlcov::toydb

#endif  // SQLCOV_TOYDB_VALUE_H_
