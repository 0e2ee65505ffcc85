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

// Client-facing process of the toy database. Answers a few built-in CALLs
// itself and forwards every other statement to the query server.

#include <unistd.h>

#include <chrono>
#include <thread>

#include "crash.h"
#include "instrument.h"
#include "manifests.h"
#include "server.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/sql/lexer.h"
#include "sqlcov/sql/parser.h"
#include "value.h"

namespace sqlcov::toydb {

namespace {

const Function kServeClient("ServeClient", {"entry", "read", "bad_frame", "builtin", "forward",
                                            "reply_rows", "reply_error"});
const Function kHandleBuiltin("HandleBuiltin",
                              {"entry", "candidate", "syntax_error", "version", "sleep",
                               "sleep_range", "cancel", "cancel_range", "bad_args", "passthrough"});
const Function kForwardToQuery("ForwardToQuery",
                               {"entry", "reconnect", "send", "rows", "error", "lost"});
const Function kCancelBackend("CancelBackend", {"entry", "mark"});

constexpr int64_t kMaxSleepMs = 10000;
constexpr int64_t kBackendSlots = 8;

}  // namespace

struct Backend {
  int id = 0;
  bool cancel_requested = false;
};

// Slot 0 is reserved for the postmaster and never populated.
Backend* g_backends[kBackendSlots];

[[gnu::noinline]] void CancelBackend(int64_t slot) {
  Frame f(kCancelBackend);
  Backend* volatile target = g_backends[slot];
  TOY_HIT(f, "mark");
  target->cancel_requested = true;
}

// Returns true and fills `reply` when `sql` is a gateway built-in.
[[gnu::noinline]] bool HandleBuiltin(const std::string& sql, WireFrame& reply) {
  Frame f(kHandleBuiltin);
  auto tokens = sql::Lex(sql);
  std::string name = tokens.size() >= 2 ? ToLower(tokens[1].text) : "";
  if (tokens.size() < 2 || ToUpper(tokens[0].text) != "CALL" ||
      (name != "version" && name != "sleep" && name != "cancel_backend")) {
    TOY_HIT(f, "passthrough");
    return false;
  }
  TOY_HIT(f, "candidate");
  sql::Node call;
  try {
    call = sql::ParseAs("call", sql);
  } catch (const sql::SyntaxError& e) {
    TOY_HIT(f, "syntax_error");
    reply = {kErrorFrame, std::string("syntax error: ") + e.what()};
    return true;
  }
  // CALL name ( [args] )
  std::vector<const sql::Node*> args;
  if (call.children.size() == 5) {
    const sql::Node& list = call.children[3];
    for (size_t i = 0; i < list.children.size(); i += 2) args.push_back(&list.children[i]);
  }
  auto int_arg = [&]() -> std::optional<int64_t> {
    if (args.size() != 1 || args[0]->tag != "int") return std::nullopt;
    return ParseIntLiteral(args[0]->text);
  };

  if (name == "version") {
    TOY_HIT(f, "version");
    if (!args.empty()) {
      TOY_HIT(f, "bad_args");
      reply = {kErrorFrame, "version() takes no arguments"};
      return true;
    }
    reply = {kRowsFrame, "toydb 1.0\n"};
    return true;
  }
  auto n = int_arg();
  if (!n) {
    TOY_HIT(f, "bad_args");
    reply = {kErrorFrame, name + "() takes one integer literal"};
    return true;
  }
  if (name == "sleep") {
    TOY_HIT(f, "sleep");
    if (*n > kMaxSleepMs) {
      TOY_HIT(f, "sleep_range");
      reply = {kErrorFrame, "sleep longer than 10000 ms"};
      return true;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(*n));
    reply = {kRowsFrame, "slept\n"};
    return true;
  }
  TOY_HIT(f, "cancel");
  if (*n >= kBackendSlots) {
    TOY_HIT(f, "cancel_range");
    reply = {kErrorFrame, "no such backend"};
    return true;
  }
  CancelBackend(*n);
  reply = {kRowsFrame, "cancelled\n"};
  return true;
}

class Gateway {
 public:
  explicit Gateway(std::string upstream) : upstream_(std::move(upstream)) {
    query_fd_ = ConnectUnixRetry(upstream_, std::chrono::seconds(10));
  }

  [[gnu::noinline]] WireFrame ForwardToQuery(const std::string& sql) {
    Frame f(kForwardToQuery);
    if (query_fd_ < 0) {
      TOY_HIT(f, "reconnect");
      try {
        query_fd_ = ConnectUnix(upstream_);
      } catch (const WireError&) {
        TOY_HIT(f, "lost");
        return {kErrorFrame, "query server unavailable"};
      }
    }
    TOY_HIT(f, "send");
    try {
      WriteFrame(query_fd_, kQueryFrame, sql);
      auto reply = ReadFrame(query_fd_);
      if (!reply) throw WireError("query server closed the connection");
      if (reply->type == kRowsFrame) {
        TOY_HIT(f, "rows");
      } else {
        TOY_HIT(f, "error");
      }
      return *reply;
    } catch (const WireError&) {
      TOY_HIT(f, "lost");
      close(query_fd_);
      query_fd_ = -1;
      return {kErrorFrame, "query server lost"};
    }
  }

  [[gnu::noinline]] WireFrame ServeClient(const WireFrame& request) {
    Frame f(kServeClient);
    TOY_HIT(f, "read");
    WireFrame reply;
    if (request.type != kQueryFrame) {
      TOY_HIT(f, "bad_frame");
      return {kErrorFrame, "expected a query frame"};
    }
    if (HandleBuiltin(request.payload, reply)) {
      TOY_HIT(f, "builtin");
    } else {
      TOY_HIT(f, "forward");
      reply = ForwardToQuery(request.payload);
    }
    if (reply.type == kRowsFrame) {
      TOY_HIT(f, "reply_rows");
    } else {
      TOY_HIT(f, "reply_error");
    }
    return reply;
  }

 private:
  std::string upstream_;
  int query_fd_ = -1;
};

}  // namespace sqlcov::toydb

int main(int argc, char** argv) {
  using namespace sqlcov::toydb;
  for (int i = 1; i < kBackendSlots; ++i) g_backends[i] = new Backend{i, false};
  return ServerMain(argc, argv, "gateway", kGatewayManifest, true, [](const ServerOptions& o) {
    int listen_fd = ListenUnix(o.listen_path);
    Gateway gateway(o.upstream_path);
    ServeForever(listen_fd, [&](const WireFrame& f) { return gateway.ServeClient(f); });
    return 0;
  });
}
