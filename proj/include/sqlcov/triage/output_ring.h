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

#ifndef SQLCOV_TRIAGE_OUTPUT_RING_H_
#define SQLCOV_TRIAGE_OUTPUT_RING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sqlcov::triage {

// Keeps the most recent `capacity` bytes of a stream.
class OutputRing {
 public:
  static constexpr size_t kDefaultCapacity = 64 * 1024;

  explicit OutputRing(size_t capacity = kDefaultCapacity);

  void Append(std::string_view bytes);
  // Oldest byte first.
  std::string Contents() const;
  void Clear();

  size_t size() const { return size_; }
  size_t capacity() const { return buffer_.size(); }
  uint64_t total_written() const { return total_; }

 private:
  std::vector<char> buffer_;
  size_t head_ = 0;  // next write position
  size_t size_ = 0;
  uint64_t total_ = 0;
};

}  // namespace sqlcov::triage

#endif  // SQLCOV_TRIAGE_OUTPUT_RING_H_
