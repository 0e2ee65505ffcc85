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

#include "server.h"

#include <signal.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "crash.h"
#include "instrument.h"

namespace sqlcov::toydb {

int ServerMain(int argc, char** argv, std::string_view binary_id,
               std::string_view manifest_text, bool needs_upstream,
               const std::function<int(const ServerOptions&)>& serve) {
  CLI::App app{"toydb " + std::string(binary_id)};
  ServerOptions options;
  bool print_manifest = false;
  bool block_count = false;
  app.add_option("--listen", options.listen_path, "Unix socket to serve on");
  if (needs_upstream) app.add_option("--upstream", options.upstream_path, "Upstream server socket");
  app.add_flag("--print-manifest", print_manifest, "Print the embedded block manifest");
  app.add_flag("--block-count", block_count, "Print the number of instrumented blocks");
  CLI11_PARSE(app, argc, argv);

  if (print_manifest) {
    std::cout << manifest_text;
    return 0;
  }
  if (block_count) {
    std::cout << RegisteredBlockCount() << "\n";
    return 0;
  }
  if (options.listen_path.empty() || (needs_upstream && options.upstream_path.empty())) {
    std::cerr << "--listen" << (needs_upstream ? " and --upstream are" : " is") << " required\n";
    return 1;
  }
  signal(SIGPIPE, SIG_IGN);
  InstallCrashReporter(binary_id);
  InitInstrumentation(binary_id, manifest_text);
  try {
    return serve(options);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%.*s: %s\n", static_cast<int>(binary_id.size()), binary_id.data(),
                 e.what());
    return 1;
  }
}

void ServeForever(int listen_fd, const FrameHandler& on_frame) {
  for (;;) {
    int conn = accept4(listen_fd, nullptr, nullptr, SOCK_CLOEXEC);
    if (conn < 0) {
      if (errno == EINTR) continue;
      return;
    }
    try {
      while (auto frame = ReadFrame(conn)) {
        WireFrame reply = on_frame(*frame);
        WriteFrame(conn, reply.type, reply.payload);
      }
    } catch (const WireError&) {
      // Peer went away mid-frame; wait for the next one.
    }
    close(conn);
  }
}

}  // namespace sqlcov::toydb
