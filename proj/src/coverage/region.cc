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

#include "sqlcov/coverage/region.h"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cstring>
#include <random>

#include "sqlcov/common/hash.h"

namespace sqlcov::coverage {

namespace {

constexpr size_t kPage = 4096;
constexpr std::string_view kHeaderMagic = "covrgn v1 header ";

std::string FreshSession() {
  static std::atomic<uint64_t> counter{0};
  std::random_device rd;
  uint64_t mix = (static_cast<uint64_t>(rd()) << 32) ^ rd() ^
                 (counter.fetch_add(1) * 0x9e3779b97f4a7c15ULL);
  return Hex64(mix).substr(0, 12);
}

std::string ErrnoText() { return std::strerror(errno); }

}  // namespace

CoverageRegion CoverageRegion::Create(const planner::GlobalLayout& layout,
                                      std::string session) {
  if (session.empty()) session = FreshSession();
  CoverageRegion r;
  r.name_ = "covrt-" + session + "-" + std::to_string(::getpid());
  r.layout_ = layout;
  std::string layout_text = planner::FormatLayout(layout);
  // Header: magic line carrying the header size, then the layout document.
  size_t header = kPage;
  while (kHeaderMagic.size() + 12 + layout_text.size() + 1 > header) header += kPage;
  r.mapping_size_ = header + layout.total_length;

  int fd = ::shm_open(("/" + r.name_).c_str(), O_CREAT | O_EXCL | O_RDWR, 0600);
  if (fd < 0) throw RegionError("shm_open(" + r.name_ + "): " + ErrnoText());
  if (::ftruncate(fd, static_cast<off_t>(r.mapping_size_)) != 0) {
    std::string err = ErrnoText();
    ::close(fd);
    ::shm_unlink(("/" + r.name_).c_str());
    throw RegionError("ftruncate(" + r.name_ + "): " + err);
  }
  void* p = ::mmap(nullptr, r.mapping_size_, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  ::close(fd);
  if (p == MAP_FAILED) {
    ::shm_unlink(("/" + r.name_).c_str());
    throw RegionError("mmap(" + r.name_ + "): " + ErrnoText());
  }
  r.mapping_ = static_cast<uint8_t*>(p);
  r.owner_ = true;
  std::string first = std::string(kHeaderMagic) + std::to_string(header) + "\n";
  std::memcpy(r.mapping_, first.data(), first.size());
  std::memcpy(r.mapping_ + first.size(), layout_text.data(), layout_text.size());
  r.counters_ = r.mapping_ + header;
  return r;
}

CoverageRegion CoverageRegion::Open(const std::string& name) {
  int fd = ::shm_open(("/" + name).c_str(), O_RDWR, 0);
  if (fd < 0) throw RegionError("shm_open(" + name + "): " + ErrnoText());
  struct stat st {};
  if (::fstat(fd, &st) != 0 || static_cast<size_t>(st.st_size) < kPage) {
    ::close(fd);
    throw RegionError("region " + name + " is truncated");
  }
  size_t size = static_cast<size_t>(st.st_size);
  void* p = ::mmap(nullptr, size, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
  ::close(fd);
  if (p == MAP_FAILED) throw RegionError("mmap(" + name + "): " + ErrnoText());
  CoverageRegion r;
  r.name_ = name;
  r.mapping_ = static_cast<uint8_t*>(p);
  r.mapping_size_ = size;
  std::string_view head(reinterpret_cast<const char*>(r.mapping_), kPage);
  if (head.substr(0, kHeaderMagic.size()) != kHeaderMagic)
    throw RegionError("region " + name + " has no header");
  size_t nl = head.find('\n');
  size_t header = 0;
  auto digits = head.substr(kHeaderMagic.size(), nl - kHeaderMagic.size());
  std::from_chars(digits.data(), digits.data() + digits.size(), header);
  if (header == 0 || header > size) throw RegionError("region " + name + " has a bad header");
  std::string_view text(reinterpret_cast<const char*>(r.mapping_) + nl + 1,
                        header - nl - 1);
  text = text.substr(0, text.find('\0'));
  r.layout_ = planner::ParseLayout(text);
  if (header + r.layout_.total_length > size)
    throw RegionError("region " + name + " is smaller than its layout");
  r.counters_ = r.mapping_ + header;
  return r;
}

CoverageRegion::CoverageRegion(CoverageRegion&& other) noexcept { *this = std::move(other); }

CoverageRegion& CoverageRegion::operator=(CoverageRegion&& other) noexcept {
  if (this != &other) {
    Release();
    name_ = std::move(other.name_);
    layout_ = std::move(other.layout_);
    mapping_ = std::exchange(other.mapping_, nullptr);
    mapping_size_ = std::exchange(other.mapping_size_, 0);
    counters_ = std::exchange(other.counters_, nullptr);
    owner_ = std::exchange(other.owner_, false);
  }
  return *this;
}

CoverageRegion::~CoverageRegion() { Release(); }

void CoverageRegion::Release() {
  if (mapping_ != nullptr) ::munmap(mapping_, mapping_size_);
  if (owner_) ::shm_unlink(("/" + name_).c_str());
  mapping_ = nullptr;
  counters_ = nullptr;
  owner_ = false;
}

WindowView CoverageRegion::Attach(std::string_view binary_id) const {
  const auto* entry = layout_.Find(binary_id);
  if (entry == nullptr)
    throw RegionError("binary '" + std::string(binary_id) + "' has no window in " + name_);
  return {counters_ + entry->offset, entry->offset, entry->length};
}

CoverageSnapshot CoverageRegion::Snapshot() const {
  CoverageSnapshot s;
  s.counters.assign(counters_, counters_ + layout_.total_length);
  s.timestamp = std::chrono::steady_clock::now();
  return s;
}

void CoverageRegion::Reset() { std::memset(counters_, 0, layout_.total_length); }

}  // namespace sqlcov::coverage
