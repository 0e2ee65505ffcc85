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

#ifndef SQLCOV_PLANNER_MANIFEST_H_
#define SQLCOV_PLANNER_MANIFEST_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqlcov/common/error.h"

namespace sqlcov::planner {

// Identifies one basic block. `index` is the block's position in its
// function's block list.
struct BlockId {
  std::string binary;
  std::string function;
  uint32_t index = 0;

  auto operator<=>(const BlockId&) const = default;
};

struct Edge {
  uint32_t src = 0;
  uint32_t dst = 0;

  auto operator<=>(const Edge&) const = default;
};

struct FunctionCfg {
  std::string name;
  std::vector<std::string> blocks;  // block names, indexed by BlockId::index
  std::vector<Edge> edges;
  uint32_t entry = 0;

  // Index of the named block, or -1.
  int64_t Find(std::string_view block) const;
};

struct BinaryManifest {
  std::string binary_id;
  std::vector<FunctionCfg> functions;

  size_t block_count() const;
  BlockId Block(size_t function, uint32_t index) const {
    return {binary_id, functions[function].name, index};
  }
};

// Thrown for semantically invalid manifests (dangling endpoints, duplicate
// blocks, ...). Syntax problems raise ParseError.
class ManifestError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Block names may not contain this marker; split dummy blocks use it.
inline constexpr std::string_view kDummyMarker = "__crit";

// Parses a document that declares exactly one binary.
BinaryManifest ParseManifest(std::string_view text);

// Parses a document that may declare any number of binaries. Binary ids must
// be unique within the document.
std::vector<BinaryManifest> ParseManifestSet(std::string_view text);

// Renders a manifest back to the textual format. Parsing the result yields
// an equal manifest.
std::string FormatManifest(const BinaryManifest& manifest);

}  // namespace sqlcov::planner

#endif  // SQLCOV_PLANNER_MANIFEST_H_
