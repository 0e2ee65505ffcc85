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

#include "sqlcov/triage/output_ring.h"

#include <algorithm>

#include "sqlcov/common/error.h"

namespace sqlcov::triage {

OutputRing::OutputRing(size_t capacity) : buffer_(capacity) {
  if (capacity == 0) throw Error("output ring capacity must be positive");
}

void OutputRing::Append(std::string_view bytes) {
  total_ += bytes.size();
  const size_t cap = buffer_.size();
  if (bytes.size() >= cap) {
    std::copy(bytes.end() - static_cast<ptrdiff_t>(cap), bytes.end(), buffer_.begin());
    head_ = 0;
    size_ = cap;
    return;
  }
  size_t first = std::min(bytes.size(), cap - head_);
  std::copy_n(bytes.begin(), first, buffer_.begin() + static_cast<ptrdiff_t>(head_));
  std::copy(bytes.begin() + static_cast<ptrdiff_t>(first), bytes.end(), buffer_.begin());
  head_ = (head_ + bytes.size()) % cap;
  size_ = std::min(cap, size_ + bytes.size());
}

std::string OutputRing::Contents() const {
  std::string out;
  out.reserve(size_);
  const size_t cap = buffer_.size();
  size_t start = (head_ + cap - size_) % cap;
  for (size_t i = 0; i < size_; ++i) out += buffer_[(start + i) % cap];
  return out;
}

void OutputRing::Clear() {
  head_ = 0;
  size_ = 0;
}

}  // namespace sqlcov::triage
