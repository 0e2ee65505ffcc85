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

#include "instrument.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>

#include "sqlcov/coverage/region.h"
#include "sqlcov/planner/cfg.h"
#include "sqlcov/planner/counters.h"
#include "sqlcov/planner/layout.h"
#include "sqlcov/planner/manifest.h"

namespace sqlcov::toydb {

namespace {

struct Runtime {
  bool bound = false;
  coverage::WindowView view;
  std::optional<coverage::CoverageRegion> region;
  std::vector<uint8_t> private_counters;
  int trace_fd = -1;
  uint64_t next_frame = 0;
  uint64_t serial = 0;
};

Runtime& State() {
  static Runtime r;
  return r;
}

std::vector<Function*>& MutableRegistry() {
  static std::vector<Function*> registry;
  return registry;
}

[[noreturn]] void Mismatch(const std::string& why) {
  std::fprintf(stderr, "handshake layout mismatch: %s\n", why.c_str());
  std::fflush(stderr);
  std::_Exit(70);
}

void Trace(uint64_t frame, const Function& fn, uint32_t block) {
  Runtime& rt = State();
  char line[256];
  int n = std::snprintf(line, sizeof(line), "%d %llu %llu %s %s\n",
                        static_cast<int>(getpid()),
                        static_cast<unsigned long long>(rt.serial++),
                        static_cast<unsigned long long>(frame), fn.name().c_str(),
                        fn.blocks()[block].c_str());
  if (n > 0) {
    ssize_t ignored = write(rt.trace_fd, line, static_cast<size_t>(std::min(n, 255)));
    (void)ignored;
  }
}

}  // namespace

Function::Function(const char* name, std::initializer_list<const char*> blocks)
    : name_(name), blocks_(blocks.begin(), blocks.end()) {
  MutableRegistry().push_back(this);
}

uint32_t Function::IndexOf(std::string_view block) const {
  for (size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i] == block) return static_cast<uint32_t>(i);
  std::fprintf(stderr, "undeclared block %s:%.*s\n", name_.c_str(),
               static_cast<int>(block.size()), block.data());
  std::abort();
}

const std::vector<Function*>& RegisteredFunctions() { return MutableRegistry(); }

size_t RegisteredBlockCount() {
  size_t n = 0;
  for (const Function* f : RegisteredFunctions()) n += f->blocks().size();
  return n;
}

void BindFunction(Function& fn, std::vector<uint32_t> counters,
                  std::vector<uint32_t> dummy_triples) {
  fn.counters_ = std::move(counters);
  fn.dummies_ = std::move(dummy_triples);
}

void InitInstrumentation(std::string_view binary_id, std::string_view manifest_text) {
  namespace pl = planner;
  pl::BinaryManifest manifest;
  try {
    manifest = pl::ParseManifest(manifest_text);
  } catch (const Error& e) {
    Mismatch(std::string("embedded manifest: ") + e.what());
  }
  if (manifest.binary_id != binary_id) Mismatch("manifest is for " + manifest.binary_id);
  if (manifest.functions.size() != RegisteredFunctions().size()) {
    Mismatch("manifest declares " + std::to_string(manifest.functions.size()) +
             " functions, code registers " + std::to_string(RegisteredFunctions().size()));
  }
  pl::BinaryManifest split = pl::SplitCriticalEdges(manifest);
  pl::CounterAssignment assignment = pl::AssignCounters(split);

  for (Function* fn : MutableRegistry()) {
    size_t fi = 0;
    while (fi < manifest.functions.size() && manifest.functions[fi].name != fn->name()) ++fi;
    if (fi == manifest.functions.size()) Mismatch("function " + fn->name() + " not in manifest");
    const pl::FunctionCfg& cfg = manifest.functions[fi];
    if (cfg.blocks != fn->blocks()) Mismatch("blocks of " + fn->name() + " differ");
    if (cfg.entry != 0) Mismatch("entry of " + fn->name() + " is not its first block");
    std::vector<uint32_t> counters;
    for (uint32_t b = 0; b < cfg.blocks.size(); ++b)
      counters.push_back(*assignment.CounterOf({manifest.binary_id, cfg.name, b}));
    std::vector<uint32_t> dummies;
    const pl::FunctionCfg& split_cfg = split.functions[fi];
    for (const pl::Edge& e : pl::FindCriticalEdges(cfg)) {
      auto d = split_cfg.Find(pl::DummyBlockName(cfg.blocks[e.src], cfg.blocks[e.dst]));
      uint32_t counter =
          *assignment.CounterOf({manifest.binary_id, cfg.name, static_cast<uint32_t>(d)});
      dummies.insert(dummies.end(), {e.src, e.dst, counter});
    }
    BindFunction(*fn, std::move(counters), std::move(dummies));
  }

  Runtime& rt = State();
  const uint32_t window = pl::AlignWindow(assignment.total_counters);
  if (const char* name = std::getenv(coverage::kRegionEnv); name && *name) {
    if (const char* id = std::getenv(coverage::kBinaryEnv); id && binary_id != id)
      Mismatch(std::string("launched as ") + id);
    try {
      rt.region.emplace(coverage::CoverageRegion::Open(name));
      rt.view = rt.region->Attach(binary_id);
    } catch (const Error& e) {
      Mismatch(e.what());
    }
    if (rt.view.length != window) {
      Mismatch("window length " + std::to_string(rt.view.length) + ", expected " +
               std::to_string(window));
    }
  } else {
    rt.private_counters.assign(window, 0);
    rt.view = {rt.private_counters.data(), 0, window};
  }
  if (const char* path = std::getenv("TOYDB_TRACE"); path && *path) {
    rt.trace_fd = open(path, O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  }
  rt.bound = true;
}

Frame::Frame(const Function& fn) : fn_(fn), id_(State().next_frame++) { Hit(0); }

void Frame::Hit(uint32_t block) {
  Runtime& rt = State();
  if (!rt.bound) return;
  coverage::RecordHit(rt.view, fn_.counters_[block]);
  if (prev_ >= 0) {
    const auto& d = fn_.dummies_;
    for (size_t i = 0; i < d.size(); i += 3) {
      if (d[i] == static_cast<uint64_t>(prev_) && d[i + 1] == block) {
        coverage::RecordHit(rt.view, d[i + 2]);
        break;
      }
    }
  }
  prev_ = block;
  if (rt.trace_fd >= 0) Trace(id_, fn_, block);
}

}  // namespace sqlcov::toydb
