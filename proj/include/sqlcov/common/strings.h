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

#ifndef SQLCOV_COMMON_STRINGS_H_
#define SQLCOV_COMMON_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace sqlcov {

std::vector<std::string_view> SplitWhitespace(std::string_view text);
std::string_view Trim(std::string_view text);
std::string ToUpper(std::string_view text);
std::string ToLower(std::string_view text);

// Reads a whole file; throws sqlcov::Error on failure.
std::string ReadFile(const std::string& path);
// Writes a whole file (truncating); throws sqlcov::Error on failure.
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace sqlcov

#endif  // SQLCOV_COMMON_STRINGS_H_
