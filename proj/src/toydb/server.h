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

#ifndef SQLCOV_TOYDB_SERVER_H_
#define SQLCOV_TOYDB_SERVER_H_

#include <functional>
#include <string>
#include <string_view>

#include "sqlcov/toydb/wire.h"

namespace sqlcov::toydb {

struct ServerOptions {
  std::string listen_path;
  std::string upstream_path;  // empty for the storage worker
};

// Shared entry point of the three toy binaries. Parses the command line
// (`--listen`, `--upstream`, `--print-manifest`, `--block-count`), starts
// instrumentation and the crash reporter, then calls `serve`.
int ServerMain(int argc, char** argv, std::string_view binary_id,
               std::string_view manifest_text, bool needs_upstream,
               const std::function<int(const ServerOptions&)>& serve);

// Accepts one connection at a time and hands each frame to `on_frame`,
// writing back its reply. Returns when the listening socket fails.
using FrameHandler = std::function<WireFrame(const WireFrame&)>;
void ServeForever(int listen_fd, const FrameHandler& on_frame);

}  // namespace sqlcov::toydb

#endif  // SQLCOV_TOYDB_SERVER_H_
