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

#ifndef SQLCOV_SQL_FRAGMENTS_H_
#define SQLCOV_SQL_FRAGMENTS_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sqlcov/sql/ast.h"

namespace sqlcov::sql {

// A statement or clause subtree salvaged from some test case.
struct Fragment {
  Node subtree;
  uint64_t origin_digest = 0;
};

// Content hash over the node kind, tag and serialized text.
uint64_t FragmentDigest(const Node& subtree);
Fragment MakeFragment(Node subtree);

// Recovering parse of each statement; every salvaged statement and clause
// becomes a fragment.
std::vector<Fragment> HarvestStatements(const std::vector<std::string>& statements);

// Bounded FIFO of fragments with digest dedup. Besides whole fragments, the
// pool indexes the subtrees inside them that the mutator can splice: whole
// statements under "statement", clauses under their own tag, and expression
// subtrees under "expression". Donor order follows insertion order.
class FragmentPool {
 public:
  static constexpr size_t kDefaultCapacity = 4096;

  explicit FragmentPool(size_t capacity = kDefaultCapacity);
  FragmentPool(FragmentPool&&) = default;
  FragmentPool& operator=(FragmentPool&&) = default;
  FragmentPool(const FragmentPool&) = delete;
  FragmentPool& operator=(const FragmentPool&) = delete;

  // False when the digest is already pooled. Evicts the oldest fragment when
  // full.
  bool Insert(Fragment fragment);
  // Number inserted.
  size_t InsertAll(std::vector<Fragment> fragments);

  size_t size() const { return fragments_.size(); }
  size_t capacity() const { return capacity_; }
  bool empty() const { return fragments_.empty(); }
  bool Contains(uint64_t digest) const { return digests_.count(digest) != 0; }
  const std::deque<Fragment>& fragments() const { return fragments_; }

  size_t DonorCount(std::string_view tag) const;
  // Index is taken modulo DonorCount(tag), which must be nonzero.
  const Node& Donor(std::string_view tag, size_t index) const;

 private:
  struct Entry {
    Fragment fragment;
    uint64_t serial;
  };
  struct DonorRef {
    uint64_t serial;
    const Node* node;
  };

  void Index(const Node& node, uint64_t serial, bool top);
  void EvictOldest();

  size_t capacity_;
  uint64_t next_serial_ = 0;
  std::deque<Fragment> fragments_;
  std::deque<uint64_t> serials_;
  std::unordered_set<uint64_t> digests_;
  std::map<std::string, std::deque<DonorRef>, std::less<>> donors_;
};

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_FRAGMENTS_H_
