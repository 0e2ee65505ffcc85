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

#ifndef SQLCOV_COVERAGE_REGION_H_
#define SQLCOV_COVERAGE_REGION_H_

#include <atomic>
#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "sqlcov/common/error.h"
#include "sqlcov/coverage/snapshot.h"
#include "sqlcov/planner/layout.h"

namespace sqlcov::coverage {

// Environment variables through which a supervised process learns where to
// write its coverage.
inline constexpr const char* kRegionEnv = "COVRT_REGION";
inline constexpr const char* kBinaryEnv = "COVRT_BINARY";

class RegionError : public Error {
 public:
  using Error::Error;
};

// One binary's slice of the region. Copies share the same counters.
struct WindowView {
  uint8_t* counters = nullptr;  // already offset to the window start
  uint32_t offset = 0;
  uint32_t length = 0;
};

// Saturating 8-bit increment. Concurrent writers may lose increments; the
// counter never wraps.
inline void RecordHit(const WindowView& view, uint32_t local_index) {
  assert(local_index < view.length);
  std::atomic_ref<uint8_t> counter(view.counters[local_index]);
  uint8_t v = counter.load(std::memory_order_relaxed);
  if (v != 255) counter.store(static_cast<uint8_t>(v + 1), std::memory_order_relaxed);
}

// Hit counters for every binary of a layout, in a named POSIX shared memory
// object so that target processes can map it. The object's name is
// `covrt-<session>-<pid>`; the layout travels in a header in front of the
// counters.
class CoverageRegion {
 public:
  // Creates and zero-fills a fresh region. An empty `session` picks a random
  // one.
  static CoverageRegion Create(const planner::GlobalLayout& layout,
                               std::string session = "");
  // Maps an existing region created by another process.
  static CoverageRegion Open(const std::string& name);

  CoverageRegion(CoverageRegion&& other) noexcept;
  CoverageRegion& operator=(CoverageRegion&& other) noexcept;
  CoverageRegion(const CoverageRegion&) = delete;
  CoverageRegion& operator=(const CoverageRegion&) = delete;
  // The creating handle unlinks the shared memory object.
  ~CoverageRegion();

  const std::string& name() const { return name_; }
  const planner::GlobalLayout& layout() const { return layout_; }
  std::span<uint8_t> counters() const { return {counters_, layout_.total_length}; }

  // Throws RegionError if the binary has no window.
  WindowView Attach(std::string_view binary_id) const;

  // Torn reads are possible while writers are active.
  CoverageSnapshot Snapshot() const;
  void Reset();

 private:
  CoverageRegion() = default;
  void Release();

  std::string name_;
  planner::GlobalLayout layout_;
  uint8_t* mapping_ = nullptr;
  size_t mapping_size_ = 0;
  uint8_t* counters_ = nullptr;
  bool owner_ = false;
};

}  // namespace sqlcov::coverage

#endif  // SQLCOV_COVERAGE_REGION_H_
