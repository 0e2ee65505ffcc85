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

#ifndef SQLCOV_COMMON_ERROR_H_
#define SQLCOV_COMMON_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sqlcov {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A textual document failed to parse. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, uint32_t line, uint32_t column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        detail_(message) {}

  uint32_t line() const { return line_; }
  uint32_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  uint32_t line_;
  uint32_t column_;
  std::string detail_;
};

}  // namespace sqlcov

#endif  // SQLCOV_COMMON_ERROR_H_
