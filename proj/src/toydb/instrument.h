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

#ifndef SQLCOV_TOYDB_INSTRUMENT_H_
#define SQLCOV_TOYDB_INSTRUMENT_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace sqlcov::toydb {

// Block-level instrumentation for the toy binaries. Each instrumented
// function declares its blocks once, in manifest order, through a static
// Function object; the first block is the entry. A Frame per invocation
// records block hits, and also records the split dummy of any critical edge
// it traverses.
class Function {
 public:
  Function(const char* name, std::initializer_list<const char*> blocks);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& blocks() const { return blocks_; }
  // Aborts on an undeclared block name: a programming error.
  uint32_t IndexOf(std::string_view block) const;

 private:
  friend class Frame;
  friend void BindFunction(Function& fn, std::vector<uint32_t> counters,
                           std::vector<uint32_t> dummy_triples);

  std::string name_;
  std::vector<std::string> blocks_;
  std::vector<uint32_t> counters_;  // window-local, per block
  std::vector<uint32_t> dummies_;   // (src, dst, counter) triples
};

// Every Function constructed so far, in construction order.
const std::vector<Function*>& RegisteredFunctions();
size_t RegisteredBlockCount();

// Checks the registered functions against `manifest_text`, plans counters
// and attaches to the window named by COVRT_REGION / COVRT_BINARY, or to a
// private buffer when COVRT_REGION is unset. A disagreement between code and
// manifest or region is fatal: the process prints
// "handshake layout mismatch: ..." and exits with status 70. Also opens the
// trace file named by TOYDB_TRACE, if set.
void InitInstrumentation(std::string_view binary_id, std::string_view manifest_text);

class Frame {
 public:
  // Records the entry block.
  explicit Frame(const Function& fn);
  Frame(const Frame&) = delete;
  Frame& operator=(const Frame&) = delete;

  void Hit(uint32_t block);
  const Function& fn() const { return fn_; }

 private:
  const Function& fn_;
  int64_t prev_ = -1;
  uint64_t id_;
};

}  // namespace sqlcov::toydb

#define TOY_HIT(frame, block)                                        \
  do {                                                               \
    static const uint32_t toy_block_ = (frame).fn().IndexOf(block); \
    (frame).Hit(toy_block_);                                         \
  } while (0)

#endif  // SQLCOV_TOYDB_INSTRUMENT_H_
