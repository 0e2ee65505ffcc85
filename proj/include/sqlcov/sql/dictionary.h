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

#ifndef SQLCOV_SQL_DICTIONARY_H_
#define SQLCOV_SQL_DICTIONARY_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sqlcov::sql {

// Dialect tokens for token-level mutation. Every entry lexes as exactly one
// token.
struct Dictionary {
  std::set<std::string> keywords;
  std::set<std::string> function_names;
  std::set<std::string> type_names;

  bool empty() const {
    return keywords.empty() && function_names.empty() && type_names.empty();
  }
  size_t size() const {
    return keywords.size() + function_names.size() + type_names.size();
  }
  // keywords, then function names, then type names; each sorted.
  std::vector<std::string> Entries() const;
};

// One token per line; `#` starts a comment. Column types (INT, TEXT, ...)
// become type names, lower-case identifiers function names, and everything
// else keywords. Throws ParseError on a line holding more than one token.
Dictionary ParseDictionary(std::string_view text);
Dictionary LoadDictionary(const std::filesystem::path& path);

// The lexer's keyword set plus the toy dialect's built-in functions.
Dictionary DefaultDictionary();

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_DICTIONARY_H_
