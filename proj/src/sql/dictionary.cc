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

#include "sqlcov/sql/dictionary.h"

#include <algorithm>
#include <cctype>

#include "sqlcov/common/error.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/sql/lexer.h"

namespace sqlcov::sql {

namespace {

constexpr std::string_view kTypeNames[] = {"INT", "INTEGER", "TEXT", "VARCHAR",
                                           "BIGINT", "BOOLEAN", "REAL"};

constexpr std::string_view kBuiltins[] = {
    "abs", "analyze", "cancel_backend", "coalesce", "count", "length",
    "lower", "max", "min", "sleep", "sum", "upper", "version"};

bool IsTypeName(std::string_view token) {
  std::string up = ToUpper(token);
  return std::find(std::begin(kTypeNames), std::end(kTypeNames), up) !=
         std::end(kTypeNames);
}

bool IsLowerIdentifier(std::string_view token) {
  return !token.empty() && std::none_of(token.begin(), token.end(), [](char c) {
    return std::isupper(static_cast<unsigned char>(c));
  }) && (std::isalpha(static_cast<unsigned char>(token[0])) || token[0] == '_');
}

}  // namespace

std::vector<std::string> Dictionary::Entries() const {
  std::vector<std::string> out(keywords.begin(), keywords.end());
  out.insert(out.end(), function_names.begin(), function_names.end());
  out.insert(out.end(), type_names.begin(), type_names.end());
  return out;
}

Dictionary ParseDictionary(std::string_view text) {
  Dictionary dict;
  uint32_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto tokens = Lex(line);
    if (tokens.size() != 1 || tokens[0].text.size() != line.size()) {
      throw ParseError("dictionary entry is not a single token: " + std::string(line),
                       line_no, 1);
    }
    if (IsTypeName(line)) {
      dict.type_names.insert(ToUpper(line));
    } else if (IsLowerIdentifier(line) && !IsKeyword(line)) {
      dict.function_names.insert(std::string(line));
    } else {
      dict.keywords.insert(std::string(line));
    }
  }
  return dict;
}

Dictionary LoadDictionary(const std::filesystem::path& path) {
  return ParseDictionary(ReadFile(path.string()));
}

Dictionary DefaultDictionary() {
  Dictionary dict;
  for (auto kw : Keywords()) {
    if (IsTypeName(kw)) dict.type_names.emplace(kw);
    else dict.keywords.emplace(kw);
  }
  for (auto fn : kBuiltins) dict.function_names.emplace(fn);
  return dict;
}

}  // namespace sqlcov::sql
