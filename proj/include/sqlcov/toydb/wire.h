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

#ifndef SQLCOV_TOYDB_WIRE_H_
#define SQLCOV_TOYDB_WIRE_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "sqlcov/common/error.h"

namespace sqlcov::toydb {

// Frames are a type byte, a 4-byte big-endian payload length and the UTF-8
// payload.
//   Q  client request: one SQL statement
//   R  result rows as CSV, one row per line
//   E  error message
//   P  planned statement, query server to storage worker
inline constexpr char kQueryFrame = 'Q';
inline constexpr char kRowsFrame = 'R';
inline constexpr char kErrorFrame = 'E';
inline constexpr char kPlanFrame = 'P';

inline constexpr uint32_t kMaxPayload = 16u << 20;

class WireError : public Error {
 public:
  using Error::Error;
};

struct WireFrame {
  char type = 0;
  std::string payload;
};

std::string EncodeFrame(char type, std::string_view payload);

// Blocking. Returns nullopt on a clean end of stream before a frame starts;
// throws WireError on a truncated or oversized frame.
std::optional<WireFrame> ReadFrame(int fd);
// Throws WireError when the peer is gone.
void WriteFrame(int fd, char type, std::string_view payload);

// Unix-domain stream sockets. Both throw WireError.
int ListenUnix(const std::string& path);
int ConnectUnix(const std::string& path);
// Retries until `path` accepts or the deadline passes.
int ConnectUnixRetry(const std::string& path, std::chrono::milliseconds timeout);

// Client side of the request protocol with a per-request deadline.
class Client {
 public:
  enum class Status { kRows, kError, kTimeout, kLost };
  struct Reply {
    Status status;
    std::string payload;
  };

  Client() = default;
  explicit Client(int fd) : fd_(fd) {}
  Client(Client&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Client& operator=(Client&& other) noexcept;
  ~Client();

  bool connected() const { return fd_ >= 0; }
  Reply Execute(std::string_view sql, std::chrono::milliseconds timeout);
  void Close();

 private:
  int fd_ = -1;
};

}  // namespace sqlcov::toydb

#endif  // SQLCOV_TOYDB_WIRE_H_
