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

#include "sqlcov/coverage/snapshot.h"

#include <charconv>
#include <cstdio>

#include "sqlcov/common/error.h"
#include "sqlcov/common/strings.h"

namespace sqlcov::coverage {

std::vector<uint32_t> CoverageSnapshot::CoveredIndices() const {
  std::vector<uint32_t> out;
  for (uint32_t i = 0; i < counters.size(); ++i)
    if (counters[i] != 0) out.push_back(i);
  return out;
}

namespace {
constexpr std::string_view kMagic = "COVSNAPv1 ";
}

std::string EncodeSnapshot(const CoverageSnapshot& snapshot) {
  char header[40];
  int n = std::snprintf(header, sizeof(header), "COVSNAPv1 %05zu\n",
                        snapshot.counters.size());
  std::string out(header, static_cast<size_t>(n));
  out.append(reinterpret_cast<const char*>(snapshot.counters.data()),
             snapshot.counters.size());
  return out;
}

CoverageSnapshot DecodeSnapshot(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic)
    throw Error("not a coverage snapshot: bad magic");
  size_t nl = bytes.find('\n');
  if (nl == std::string_view::npos || nl > 32)
    throw Error("not a coverage snapshot: header not terminated");
  std::string_view digits = bytes.substr(kMagic.size(), nl - kMagic.size());
  size_t length = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), length);
  if (ec != std::errc() || p != digits.data() + digits.size() || digits.empty())
    throw Error("not a coverage snapshot: bad length field");
  std::string_view body = bytes.substr(nl + 1);
  if (body.size() != length)
    throw Error("coverage snapshot length mismatch: header says " +
                std::to_string(length) + ", body has " + std::to_string(body.size()));
  CoverageSnapshot out;
  out.counters.assign(body.begin(), body.end());
  return out;
}

void WriteSnapshotFile(const std::string& path, const CoverageSnapshot& snapshot) {
  WriteFile(path, EncodeSnapshot(snapshot));
}

CoverageSnapshot ReadSnapshotFile(const std::string& path) {
  return DecodeSnapshot(ReadFile(path));
}

}  // namespace sqlcov::coverage
