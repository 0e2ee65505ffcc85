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

#include "sqlcov/planner/manifest.h"

#include <map>
#include <set>
#include <unordered_map>

namespace sqlcov::planner {

int64_t FunctionCfg::Find(std::string_view block) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i] == block) return static_cast<int64_t>(i);
  return -1;
}

size_t BinaryManifest::block_count() const {
  size_t n = 0;
  for (const auto& f : functions) n += f.blocks.size();
  return n;
}

namespace {

struct Token {
  std::string_view text;
  uint32_t column;  // 1-based
};

std::vector<Token> Tokenize(std::string_view line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r' && line[i] != '#')
      ++i;
    out.push_back({line.substr(start, i - start),
                   static_cast<uint32_t>(start + 1)});
  }
  return out;
}

struct PendingEdge {
  std::string src, dst;
  uint32_t line, column;
};

struct PendingFunction {
  FunctionCfg cfg;
  std::string entry_name;
  uint32_t line = 0, entry_column = 0;
  std::unordered_map<std::string, uint32_t> index;
  std::vector<PendingEdge> edges;
};

class ManifestParser {
 public:
  std::vector<BinaryManifest> Run(std::string_view text) {
    uint32_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      ++line_no;
      Line(text.substr(pos, nl - pos), line_no);
      pos = nl + 1;
    }
    CloseFunction();
    CloseBinary();
    return std::move(out_);
  }

 private:
  void Line(std::string_view line, uint32_t n) {
    auto toks = Tokenize(line);
    if (toks.empty()) return;
    std::string_view kw = toks[0].text;
    auto expect = [&](size_t count, const char* usage) {
      if (toks.size() != count) {
        uint32_t col = toks.size() > count ? toks[count].column
                                           : static_cast<uint32_t>(line.size() + 1);
        throw ParseError(std::string("expected `") + usage + "`", n, col);
      }
    };
    if (kw == "binary") {
      expect(2, "binary <binaryId>");
      CloseFunction();
      CloseBinary();
      std::string id(toks[1].text);
      if (!binary_ids_.insert(id).second)
        throw ManifestError("duplicate binary id '" + id + "'", n,
                            toks[1].column);
      current_ = BinaryManifest{id, {}};
      have_binary_ = true;
    } else if (kw == "function") {
      expect(4, "function <name> entry <block>");
      if (toks[2].text != "entry")
        throw ParseError("expected keyword 'entry'", n, toks[2].column);
      if (!have_binary_)
        throw ParseError("function outside of a binary", n, toks[0].column);
      CloseFunction();
      std::string name(toks[1].text);
      if (!function_names_.insert(name).second)
        throw ManifestError("duplicate function '" + name + "'", n,
                            toks[1].column);
      fn_ = PendingFunction{};
      fn_.cfg.name = name;
      fn_.entry_name = std::string(toks[3].text);
      fn_.line = n;
      fn_.entry_column = toks[3].column;
      have_fn_ = true;
    } else if (kw == "block") {
      expect(2, "block <name>");
      RequireFunction(n, toks[0].column);
      std::string name(toks[1].text);
      if (name.find(kDummyMarker) != std::string::npos)
        throw ManifestError("block name uses reserved marker '" +
                                std::string(kDummyMarker) + "'",
                            n, toks[1].column);
      if (fn_.index.count(name))
        throw ManifestError("duplicate block '" + name + "'", n,
                            toks[1].column);
      fn_.index[name] = static_cast<uint32_t>(fn_.cfg.blocks.size());
      fn_.cfg.blocks.push_back(name);
    } else if (kw == "edge") {
      expect(3, "edge <src> <dst>");
      RequireFunction(n, toks[0].column);
      fn_.edges.push_back({std::string(toks[1].text),
                           std::string(toks[2].text), n, toks[1].column});
    } else if (kw == "call") {
      // Call-graph facts are accepted and ignored.
      expect(2, "call <callee>");
      RequireFunction(n, toks[0].column);
    } else {
      throw ParseError("unknown directive '" + std::string(kw) + "'", n,
                       toks[0].column);
    }
  }

  void RequireFunction(uint32_t n, uint32_t col) {
    if (!have_fn_) throw ParseError("directive outside of a function", n, col);
  }

  void CloseFunction() {
    if (!have_fn_) return;
    have_fn_ = false;
    auto it = fn_.index.find(fn_.entry_name);
    if (it == fn_.index.end())
      throw ManifestError("missing entry block '" + fn_.entry_name + "'",
                          fn_.line, fn_.entry_column);
    fn_.cfg.entry = it->second;
    std::set<Edge> seen;
    for (const auto& e : fn_.edges) {
      auto s = fn_.index.find(e.src);
      auto d = fn_.index.find(e.dst);
      if (s == fn_.index.end() || d == fn_.index.end()) {
        const std::string& bad = s == fn_.index.end() ? e.src : e.dst;
        throw ManifestError("dangling edge endpoint '" + bad + "'", e.line,
                            e.column);
      }
      Edge edge{s->second, d->second};
      if (!seen.insert(edge).second)
        throw ManifestError("duplicate edge " + e.src + " -> " + e.dst, e.line,
                            e.column);
      fn_.cfg.edges.push_back(edge);
    }
    current_.functions.push_back(std::move(fn_.cfg));
  }

  void CloseBinary() {
    if (!have_binary_) return;
    have_binary_ = false;
    function_names_.clear();
    out_.push_back(std::move(current_));
  }

  std::vector<BinaryManifest> out_;
  std::set<std::string> binary_ids_;
  std::set<std::string> function_names_;
  BinaryManifest current_;
  PendingFunction fn_;
  bool have_binary_ = false;
  bool have_fn_ = false;
};

}  // namespace

std::vector<BinaryManifest> ParseManifestSet(std::string_view text) {
  return ManifestParser().Run(text);
}

BinaryManifest ParseManifest(std::string_view text) {
  auto set = ParseManifestSet(text);
  if (set.size() != 1)
    throw ParseError("expected exactly one binary, found " +
                         std::to_string(set.size()),
                     1, 1);
  return std::move(set.front());
}

std::string FormatManifest(const BinaryManifest& manifest) {
  std::string out = "binary " + manifest.binary_id + "\n";
  for (const auto& f : manifest.functions) {
    out += "function " + f.name + " entry " + f.blocks.at(f.entry) + "\n";
    for (const auto& b : f.blocks) out += "block " + b + "\n";
    for (const auto& e : f.edges)
      out += "edge " + f.blocks[e.src] + " " + f.blocks[e.dst] + "\n";
  }
  return out;
}

}  // namespace sqlcov::planner
