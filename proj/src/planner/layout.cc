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

#include "sqlcov/planner/layout.h"

#include <algorithm>
#include <charconv>
#include <set>

#include "sqlcov/common/strings.h"
#include "sqlcov/planner/cfg.h"

namespace sqlcov::planner {

const LayoutEntry* GlobalLayout::Find(std::string_view binary_id) const {
  for (const auto& e : entries)
    if (e.binary_id == binary_id) return &e;
  return nullptr;
}

uint32_t AlignWindow(uint32_t counters) {
  return (counters + kWindowAlignment - 1) / kWindowAlignment *
         kWindowAlignment;
}

GlobalLayout LinkLayouts(std::span<const CounterAssignment> assignments) {
  std::vector<const CounterAssignment*> sorted;
  for (const auto& a : assignments) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->binary_id < b->binary_id; });
  GlobalLayout out;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i]->binary_id == sorted[i - 1]->binary_id)
      throw PlanError("duplicate binary id '" + sorted[i]->binary_id + "'");
    uint32_t length = AlignWindow(sorted[i]->total_counters);
    out.entries.push_back({sorted[i]->binary_id, out.total_length, length});
    out.total_length += length;
  }
  return out;
}

std::string FormatLayout(const GlobalLayout& layout) {
  std::string out = "layout v1 total " + std::to_string(layout.total_length) + "\n";
  for (const auto& e : layout.entries)
    out += e.binary_id + " " + std::to_string(e.offset) + " " +
           std::to_string(e.length) + "\n";
  return out;
}

namespace {

uint32_t ParseCount(std::string_view tok, uint32_t line, uint32_t col) {
  uint32_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError("expected a decimal count, got '" + std::string(tok) + "'",
                     line, col);
  return v;
}

}  // namespace

GlobalLayout ParseLayout(std::string_view text) {
  GlobalLayout out;
  uint32_t line_no = 0;
  bool header = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      throw ParseError("missing trailing newline", line_no + 1, 1);
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto toks = SplitWhitespace(line);
    if (!header) {
      if (toks.size() != 4 || toks[0] != "layout" || toks[1] != "v1" ||
          toks[2] != "total")
        throw ParseError("expected `layout v1 total <N>`", line_no, 1);
      out.total_length = ParseCount(toks[3], line_no, 18);
      header = true;
      continue;
    }
    if (toks.size() != 3)
      throw ParseError("expected `<binaryId> <offset> <length>`", line_no, 1);
    out.entries.push_back({std::string(toks[0]), ParseCount(toks[1], line_no, 1),
                           ParseCount(toks[2], line_no, 1)});
  }
  if (!header) throw ParseError("empty layout document", 1, 1);
  // Entries must be sorted, contiguous and exhaustive.
  uint32_t cursor = 0;
  for (size_t i = 0; i < out.entries.size(); ++i) {
    const auto& e = out.entries[i];
    if (i > 0 && !(out.entries[i - 1].binary_id < e.binary_id))
      throw ParseError("binaries not in strictly sorted order", i + 2, 1);
    if (e.offset != cursor)
      throw ParseError("window for '" + e.binary_id + "' is not contiguous",
                       i + 2, 1);
    cursor += e.length;
  }
  if (cursor != out.total_length)
    throw ParseError("windows do not cover the declared total", 1, 1);
  return out;
}

double EstimateCollisionLoad(uint64_t blocks, uint64_t counters) {
  if (counters == 0) throw PlanError("collision load needs at least one counter");
  return static_cast<double>(blocks) / static_cast<double>(counters);
}

Plan BuildPlan(std::span<const BinaryManifest> manifests) {
  Plan plan;
  for (const auto& m : manifests) {
    plan.split.push_back(SplitCriticalEdges(m));
    plan.assignments.push_back(AssignCounters(plan.split.back()));
  }
  plan.layout = LinkLayouts(plan.assignments);
  return plan;
}

}  // namespace sqlcov::planner
