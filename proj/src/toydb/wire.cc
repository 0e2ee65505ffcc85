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

#include "sqlcov/toydb/wire.h"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

namespace sqlcov::toydb {

namespace {

bool ReadExact(int fd, char* out, size_t n, bool allow_eof) {
  size_t got = 0;
  while (got < n) {
    ssize_t r = read(fd, out + got, n - got);
    if (r == 0) {
      if (got == 0 && allow_eof) return false;
      throw WireError("truncated frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      if (got == 0 && allow_eof && errno == ECONNRESET) return false;
      throw WireError(std::string("read: ") + std::strerror(errno));
    }
    got += static_cast<size_t>(r);
  }
  return true;
}

sockaddr_un Address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) throw WireError("socket path too long: " + path);
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

}  // namespace

std::string EncodeFrame(char type, std::string_view payload) {
  if (payload.size() > kMaxPayload) throw WireError("payload too large");
  std::string out;
  out.reserve(payload.size() + 5);
  out.push_back(type);
  uint32_t n = static_cast<uint32_t>(payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xff));
  out.append(payload);
  return out;
}

std::optional<WireFrame> ReadFrame(int fd) {
  char header[5];
  if (!ReadExact(fd, header, 5, true)) return std::nullopt;
  uint32_t n = 0;
  for (int i = 1; i < 5; ++i) n = (n << 8) | static_cast<unsigned char>(header[i]);
  if (n > kMaxPayload) throw WireError("oversized frame");
  WireFrame frame;
  frame.type = header[0];
  frame.payload.resize(n);
  if (n > 0) ReadExact(fd, frame.payload.data(), n, false);
  return frame;
}

void WriteFrame(int fd, char type, std::string_view payload) {
  std::string bytes = EncodeFrame(type, payload);
  size_t sent = 0;
  while (sent < bytes.size()) {
    ssize_t w = send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw WireError(std::string("write: ") + std::strerror(errno));
    }
    sent += static_cast<size_t>(w);
  }
}

int ListenUnix(const std::string& path) {
  sockaddr_un addr = Address(path);
  int fd = socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw WireError(std::string("socket: ") + std::strerror(errno));
  unlink(path.c_str());
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || listen(fd, 8) != 0) {
    int err = errno;
    close(fd);
    throw WireError("bind " + path + ": " + std::strerror(err));
  }
  return fd;
}

int ConnectUnix(const std::string& path) {
  sockaddr_un addr = Address(path);
  int fd = socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw WireError(std::string("socket: ") + std::strerror(errno));
  if (connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    close(fd);
    throw WireError("connect " + path + ": " + std::strerror(err));
  }
  return fd;
}

int ConnectUnixRetry(const std::string& path, std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    try {
      return ConnectUnix(path);
    } catch (const WireError&) {
      if (std::chrono::steady_clock::now() >= deadline) throw;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

Client& Client::operator=(Client&& other) noexcept {
  if (this != &other) {
    Close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Client::~Client() { Close(); }

void Client::Close() {
  if (fd_ >= 0) close(fd_);
  fd_ = -1;
}

Client::Reply Client::Execute(std::string_view sql, std::chrono::milliseconds timeout) {
  if (fd_ < 0) return {Status::kLost, "not connected"};
  try {
    WriteFrame(fd_, kQueryFrame, sql);
  } catch (const WireError& e) {
    return {Status::kLost, e.what()};
  }
  pollfd p{fd_, POLLIN, 0};
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return {Status::kTimeout, ""};
    int r = poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) {
      if (r == 0) return {Status::kTimeout, ""};
      return {Status::kLost, std::strerror(errno)};
    }
    break;
  }
  try {
    auto frame = ReadFrame(fd_);
    if (!frame) return {Status::kLost, "connection closed"};
    if (frame->type == kRowsFrame) return {Status::kRows, std::move(frame->payload)};
    if (frame->type == kErrorFrame) return {Status::kError, std::move(frame->payload)};
    return {Status::kLost, "unexpected frame type"};
  } catch (const WireError& e) {
    return {Status::kLost, e.what()};
  }
}

}  // namespace sqlcov::toydb
