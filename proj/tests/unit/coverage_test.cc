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

#include <sys/wait.h>
#include <unistd.h>

#include <regex>

#include "gtest/gtest.h"
#include "sqlcov/common/rng.h"
#include "sqlcov/coverage/novelty.h"
#include "sqlcov/coverage/region.h"
#include "sqlcov/coverage/snapshot.h"

namespace sqlcov::coverage {
namespace {

planner::GlobalLayout XYLayout() {
  return {{{"X", 0, 64}, {"Y", 64, 64}}, 128};
}

CoverageSnapshot Snap(std::vector<uint8_t> counters) {
  CoverageSnapshot s;
  s.counters = std::move(counters);
  return s;
}

TEST(CoverageRegion, CreateIsZeroFilledWithFreshNames) {
  auto a = CoverageRegion::Create(XYLayout());
  auto b = CoverageRegion::Create(XYLayout());
  EXPECT_NE(a.name(), b.name());
  EXPECT_TRUE(std::regex_match(a.name(), std::regex("covrt-[0-9a-f]+-" + std::to_string(getpid()))));
  auto s = a.Snapshot();
  ASSERT_EQ(s.size(), 128u);
  EXPECT_TRUE(s.CoveredIndices().empty());
}

TEST(CoverageRegion, AttachReturnsBinaryWindow) {
  auto r = CoverageRegion::Create(XYLayout());
  auto y = r.Attach("Y");
  EXPECT_EQ(y.offset, 64u);
  EXPECT_EQ(y.length, 64u);
  EXPECT_THROW(r.Attach("Z"), RegionError);
  auto x1 = r.Attach("X");
  auto x2 = r.Attach("X");
  EXPECT_EQ(x1.counters, x2.counters);
  EXPECT_EQ(x1.offset, x2.offset);
}

TEST(RecordHit, IncrementsAndSaturates) {
  auto r = CoverageRegion::Create(XYLayout());
  auto y = r.Attach("Y");
  RecordHit(y, 0);
  EXPECT_EQ(r.counters()[64], 1);
  for (int i = 0; i < 300; ++i) RecordHit(y, 5);
  EXPECT_EQ(r.counters()[69], 255);
}

TEST(RecordHit, WindowIsolation) {
  auto r = CoverageRegion::Create(XYLayout());
  auto x = r.Attach("X");
  for (uint32_t i = 0; i < x.length; ++i)
    for (int k = 0; k <= static_cast<int>(i); ++k) RecordHit(x, i);
  auto s = r.Snapshot();
  for (uint32_t i = 64; i < 128; ++i) EXPECT_EQ(s.counters[i], 0) << i;
  EXPECT_EQ(s.CoveredIndices().size(), 64u);
}

TEST(CoverageRegion, SharedWithChildProcess) {
  auto r = CoverageRegion::Create(XYLayout());
  pid_t pid = fork();
  if (pid == 0) {
    auto mine = CoverageRegion::Open(r.name());
    auto y = mine.Attach("Y");
    RecordHit(y, 3);
    RecordHit(y, 3);
    _exit(mine.layout().total_length == 128 ? 0 : 1);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(r.Snapshot().counters[67], 2);
}

TEST(CoverageRegion, SnapshotResetSnapshot) {
  auto r = CoverageRegion::Create(XYLayout());
  auto x = r.Attach("X");
  RecordHit(x, 1);
  RecordHit(x, 2);
  RecordHit(x, 2);
  auto first = r.Snapshot();
  r.Reset();
  auto second = r.Snapshot();
  EXPECT_EQ(first.CoveredIndices(), (std::vector<uint32_t>{1, 2}));
  EXPECT_EQ(first.counters[2], 2);
  EXPECT_TRUE(second.CoveredIndices().empty());
  EXPECT_EQ(second.size(), r.layout().total_length);
}

TEST(CoverageRegion, OpenMissingRegionFails) {
  EXPECT_THROW(CoverageRegion::Open("covrt-doesnotexist-1"), RegionError);
}

TEST(Bucket, Table) {
  const std::pair<int, int> cases[] = {{0, 0},   {1, 1},   {2, 2},   {3, 3},
                                       {4, 4},   {7, 4},   {8, 5},   {15, 5},
                                       {16, 6},  {31, 6},  {32, 7},  {127, 7},
                                       {128, 8}, {255, 8}};
  for (auto [hits, bucket] : cases) EXPECT_EQ(Bucket(static_cast<uint8_t>(hits)), bucket) << hits;
}

TEST(Classify, NewBlock) {
  std::vector<uint8_t> c(8, 0);
  c[5] = 1;
  CumulativeTable table(8);
  auto report = Classify(Snap(c), table);
  EXPECT_EQ(report.new_blocks, std::vector<uint32_t>{5});
  EXPECT_TRUE(report.interesting());
  EXPECT_EQ(table.CoveredCount(), 0u);  // pure
}

TEST(Classify, DominatedSnapshotIsNotInteresting) {
  auto snap = Snap({0, 1, 9, 200});
  CumulativeTable table(4);
  UnionInto(table, snap);
  EXPECT_FALSE(Classify(snap, table).interesting());
  EXPECT_FALSE(Classify(Snap({0, 1, 8, 130}), table).interesting());
}

TEST(Classify, BucketIncrease) {
  CumulativeTable table(2);
  UnionInto(table, Snap({1, 0}));
  auto report = Classify(Snap({2, 0}), table);
  EXPECT_TRUE(report.new_blocks.empty());
  ASSERT_EQ(report.new_buckets.size(), 1u);
  EXPECT_EQ(report.new_buckets[0], (std::pair<uint32_t, uint8_t>{0, 2}));
}

TEST(Classify, LengthMismatch) {
  CumulativeTable table(3);
  EXPECT_THROW(Classify(Snap({1}), table), LengthMismatch);
  EXPECT_THROW(UnionInto(table, Snap({1})), LengthMismatch);
}

TEST(UnionInto, CountsNewBlocksAndIsIdempotent) {
  std::vector<uint8_t> c(16, 0);
  for (int i : {0, 2, 3, 7, 8, 9, 15}) c[i] = static_cast<uint8_t>(i + 1);
  CumulativeTable table(16);
  EXPECT_EQ(UnionInto(table, Snap(c)), 7u);
  EXPECT_EQ(UnionInto(table, Snap(c)), 0u);
  EXPECT_EQ(table.CoveredCount(), 7u);
}

TEST(UnionInto, MonotoneAndOrderIndependent) {
  Rng rng(9);
  std::vector<CoverageSnapshot> snaps;
  for (int i = 0; i < 20; ++i) {
    std::vector<uint8_t> c(64);
    for (auto& v : c) v = OneIn(rng, 3) ? static_cast<uint8_t>(Below(rng, 256)) : 0;
    snaps.push_back(Snap(c));
  }
  CumulativeTable forward(64), backward(64);
  size_t last = 0;
  for (const auto& s : snaps) {
    UnionInto(forward, s);
    EXPECT_GE(forward.CoveredCount(), last);
    last = forward.CoveredCount();
  }
  for (auto it = snaps.rbegin(); it != snaps.rend(); ++it) UnionInto(backward, *it);
  EXPECT_EQ(forward.max_bucket, backward.max_bucket);
}

TEST(Accumulate, SaturatingSum) {
  CoverageSnapshot total;
  Accumulate(total, Snap({1, 200, 0}));
  Accumulate(total, Snap({2, 100, 0}));
  EXPECT_EQ(total.counters, (std::vector<uint8_t>{3, 255, 0}));
}

TEST(SnapshotFile, HeaderIsSixteenBytes) {
  auto bytes = EncodeSnapshot(Snap(std::vector<uint8_t>(128, 7)));
  EXPECT_EQ(bytes.substr(0, 16), "COVSNAPv1 00128\n");
  EXPECT_EQ(bytes.size(), 16u + 128u);
  auto back = DecodeSnapshot(bytes);
  EXPECT_EQ(back.counters, std::vector<uint8_t>(128, 7));
  EXPECT_THROW(DecodeSnapshot("COVSNAPv2 00001\nx"), Error);
  EXPECT_THROW(DecodeSnapshot("COVSNAPv1 00002\nx"), Error);
}

TEST(SnapshotFile, RoundTripRandom) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    std::vector<uint8_t> c(Below(rng, 200000));
    for (auto& v : c) v = static_cast<uint8_t>(rng());
    EXPECT_EQ(DecodeSnapshot(EncodeSnapshot(Snap(c))).counters, c);
  }
}

}  // namespace
}  // namespace sqlcov::coverage
