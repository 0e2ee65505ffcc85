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

#include "value.h"

#include <charconv>

#include "sqlcov/common/strings.h"

namespace sqlcov::toydb {

std::optional<ColumnType> ParseColumnType(std::string_view keyword) {
  std::string up = ToUpper(keyword);
  if (up == "INT") return ColumnType::kInt;
  if (up == "TEXT") return ColumnType::kText;
  return std::nullopt;
}

int CompareValues(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* x = std::get_if<int64_t>(&a)) {
    int64_t y = std::get<int64_t>(b);
    return *x < y ? -1 : *x > y ? 1 : 0;
  }
  if (const auto* x = std::get_if<std::string>(&a)) {
    int c = x->compare(std::get<std::string>(b));
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  return 0;
}

std::string FormatRows(const std::vector<Row>& rows) {
  std::string out;
  for (const Row& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const Value& v = row[i];
      if (IsNull(v)) out += "NULL";
      else if (const auto* n = std::get_if<int64_t>(&v)) out += std::to_string(*n);
      else out += std::get<std::string>(v);
    }
    out += '\n';
  }
  return out;
}

std::optional<int64_t> ParseIntLiteral(std::string_view digits) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return v;
}

std::string UnquoteString(std::string_view literal) {
  std::string out;
  if (literal.size() < 2) return out;
  for (size_t i = 1; i + 1 < literal.size(); ++i) {
    out += literal[i];
    if (literal[i] == '\'' && i + 2 < literal.size() && literal[i + 1] == '\'') ++i;
  }
  return out;
}

}  // namespace sqlcov::toydb
