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

#include "sqlcov/sql/fragments.h"

#include <cassert>
#include <utility>

#include "sqlcov/common/hash.h"
#include "sqlcov/sql/parser.h"

namespace sqlcov::sql {

uint64_t FragmentDigest(const Node& subtree) {
  Fnv1a h;
  h.Update(KindName(subtree.kind));
  h.Update(subtree.tag);
  h.Update(Serialize(subtree));
  return h.digest();
}

Fragment MakeFragment(Node subtree) {
  Fragment f;
  f.origin_digest = FragmentDigest(subtree);
  f.subtree = std::move(subtree);
  return f;
}

std::vector<Fragment> HarvestStatements(const std::vector<std::string>& statements) {
  std::vector<Fragment> out;
  for (const auto& s : statements) {
    PartialParse partial = ParseRecovering(s);
    for (auto& n : partial.subtrees) out.push_back(MakeFragment(std::move(n)));
  }
  return out;
}

FragmentPool::FragmentPool(size_t capacity) : capacity_(capacity) {
  assert(capacity > 0);
}

bool FragmentPool::Insert(Fragment fragment) {
  if (!digests_.insert(fragment.origin_digest).second) return false;
  if (fragments_.size() == capacity_) EvictOldest();
  uint64_t serial = next_serial_++;
  fragments_.push_back(std::move(fragment));
  serials_.push_back(serial);
  Index(fragments_.back().subtree, serial, true);
  return true;
}

size_t FragmentPool::InsertAll(std::vector<Fragment> fragments) {
  size_t n = 0;
  for (auto& f : fragments) n += Insert(std::move(f));
  return n;
}

void FragmentPool::Index(const Node& node, uint64_t serial, bool top) {
  if (node.kind == NodeKind::kStatement) {
    donors_["statement"].push_back({serial, &node});
  } else if (node.kind == NodeKind::kClause && (top || !node.is_list())) {
    donors_[node.tag].push_back({serial, &node});
  } else if (node.is_expression()) {
    donors_["expression"].push_back({serial, &node});
  }
  for (const auto& c : node.children) Index(c, serial, false);
}

void FragmentPool::EvictOldest() {
  uint64_t serial = serials_.front();
  for (auto it = donors_.begin(); it != donors_.end();) {
    auto& refs = it->second;
    while (!refs.empty() && refs.front().serial == serial) refs.pop_front();
    it = refs.empty() ? donors_.erase(it) : std::next(it);
  }
  digests_.erase(fragments_.front().origin_digest);
  fragments_.pop_front();
  serials_.pop_front();
}

size_t FragmentPool::DonorCount(std::string_view tag) const {
  auto it = donors_.find(tag);
  return it == donors_.end() ? 0 : it->second.size();
}

const Node& FragmentPool::Donor(std::string_view tag, size_t index) const {
  const auto& refs = donors_.find(tag)->second;
  return *refs[index % refs.size()].node;
}

}  // namespace sqlcov::sql
