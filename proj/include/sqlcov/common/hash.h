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

#ifndef SQLCOV_COMMON_HASH_H_
#define SQLCOV_COMMON_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace sqlcov {

// 64-bit FNV-1a. Stable across platforms and runs, which is what digests
// persisted to disk need.
class Fnv1a {
 public:
  static constexpr uint64_t kOffset = 14695981039346656037ULL;
  static constexpr uint64_t kPrime = 1099511628211ULL;

  Fnv1a& Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kPrime;
    }
    return *this;
  }
  Fnv1a& Update(uint64_t value) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (value >> (8 * i)) & 0xff;
      state_ *= kPrime;
    }
    return *this;
  }
  uint64_t digest() const { return state_; }

 private:
  uint64_t state_ = kOffset;
};

inline uint64_t HashBytes(std::string_view bytes) {
  return Fnv1a().Update(bytes).digest();
}

// Lower-case, zero-padded, 16 characters.
std::string Hex64(uint64_t value);

}  // namespace sqlcov

#endif  // SQLCOV_COMMON_HASH_H_
