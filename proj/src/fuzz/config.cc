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

#include "sqlcov/fuzz/config.h"

#include <charconv>
#include <ctime>
#include <random>

#include "sqlcov/common/hash.h"
#include "sqlcov/common/strings.h"

namespace sqlcov::fuzz {

namespace fs = std::filesystem;

namespace {

template <typename T>
T Number(std::string_view key, std::string_view value, uint32_t line) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ParseError("bad value for " + std::string(key) + ": '" + std::string(value) + "'",
                     line, 1);
  return out;
}

bool Bool(std::string_view key, std::string_view value, uint32_t line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("bad value for " + std::string(key) + ": '" + std::string(value) + "'", line, 1);
}

}  // namespace

void FuzzConfig::Validate() const {
  auto need_dir = [](const fs::path& p, const char* key) {
    if (p.empty() || !fs::is_directory(p))
      throw ConfigError(std::string(key) + ": not a directory: " + p.string());
  };
  auto need_file = [](const fs::path& p, const char* key) {
    if (p.empty() || !fs::is_regular_file(p))
      throw ConfigError(std::string(key) + ": no such file: " + p.string());
  };
  need_dir(seed_dir, "seed_dir");
  if (!dictionary.empty()) need_file(dictionary, "dictionary");
  need_file(layout, "layout");
  need_dir(target_dir, "target_dir");
  for (const char* binary : {"toydb_gateway", "toydb_query", "toydb_storage"})
    need_file(target_dir / binary, "target_dir");
  if (!dry_run && !budget_seconds && !budget_executions)
    throw ConfigError("budget: set budget_seconds and/or budget_executions");
  if (budget_seconds && !(*budget_seconds > 0))
    throw ConfigError("budget_seconds must be positive");
  if (statement_timeout.count() <= 0) throw ConfigError("statement_timeout_ms must be positive");
  if (case_timeout < statement_timeout)
    throw ConfigError("case_timeout_ms must be at least statement_timeout_ms");
  if (base_energy == 0) throw ConfigError("base_energy must be positive");
  if (!(stats_interval_seconds > 0)) throw ConfigError("stats_interval_s must be positive");
  if (max_restarts == 0) throw ConfigError("max_restarts must be positive");
  try {
    mix.Validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("strategy weights: ") + e.what());
  }
}

FuzzConfig ParseConfig(std::string_view text, const fs::path& base_dir) {
  FuzzConfig c;
  bool versioned = false;
  auto path = [&](std::string_view v) {
    fs::path p{std::string(v)};
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  uint32_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no, 1);
    std::string_view key = Trim(line.substr(0, eq));
    std::string_view value = Trim(line.substr(eq + 1));
    if (key == "config_version") {
      if (Number<int>(key, value, line_no) != kConfigVersion)
        throw ParseError("unsupported config_version " + std::string(value), line_no, 1);
      versioned = true;
    } else if (key == "seed_dir") {
      c.seed_dir = path(value);
    } else if (key == "dictionary") {
      c.dictionary = path(value);
    } else if (key == "layout") {
      c.layout = path(value);
    } else if (key == "target_dir") {
      c.target_dir = path(value);
    } else if (key == "reports_dir") {
      c.reports_dir = path(value);
    } else if (key == "stats") {
      c.stats = path(value);
    } else if (key == "budget_seconds") {
      c.budget_seconds = Number<double>(key, value, line_no);
    } else if (key == "budget_executions") {
      c.budget_executions = Number<uint64_t>(key, value, line_no);
    } else if (key == "statement_timeout_ms") {
      c.statement_timeout = std::chrono::milliseconds(Number<int64_t>(key, value, line_no));
    } else if (key == "case_timeout_ms") {
      c.case_timeout = std::chrono::milliseconds(Number<int64_t>(key, value, line_no));
    } else if (key == "ast_weight") {
      c.mix.ast = Number<double>(key, value, line_no);
    } else if (key == "dictionary_weight") {
      c.mix.dictionary = Number<double>(key, value, line_no);
    } else if (key == "drop_interval") {
      c.drop_interval = Number<uint64_t>(key, value, line_no);
    } else if (key == "base_energy") {
      c.base_energy = Number<uint32_t>(key, value, line_no);
    } else if (key == "rng_seed") {
      c.rng_seed = Number<uint64_t>(key, value, line_no);
    } else if (key == "session") {
      c.session = std::string(value);
    } else if (key == "stats_interval_s") {
      c.stats_interval_seconds = Number<double>(key, value, line_no);
    } else if (key == "max_restarts") {
      c.max_restarts = Number<uint32_t>(key, value, line_no);
    } else if (key == "feedback") {
      c.feedback = Bool(key, value, line_no);
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", line_no, 1);
    }
  }
  if (!versioned) throw ParseError("missing config_version", 1, 1);
  return c;
}

FuzzConfig LoadConfig(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("no such config file: " + path.string());
  return ParseConfig(ReadFile(path.string()), path.parent_path());
}

std::string DeriveSessionId() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm);
  std::random_device rd;
  return std::string(stamp) + "-" + Hex64(rd()).substr(12);
}

}  // namespace sqlcov::fuzz
