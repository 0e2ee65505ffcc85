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

#ifndef SQLCOV_FUZZ_CONFIG_H_
#define SQLCOV_FUZZ_CONFIG_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sqlcov/common/error.h"
#include "sqlcov/sql/generator.h"

namespace sqlcov::fuzz {

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kConfigVersion = 1;

struct FuzzConfig {
  std::filesystem::path seed_dir;
  std::filesystem::path dictionary;  // empty: built-in dictionary
  std::filesystem::path layout;
  std::filesystem::path target_dir;  // holds toydb_gateway, toydb_query, toydb_storage
  std::filesystem::path reports_dir = "reports";
  std::filesystem::path stats = "stats.csv";

  // At least one budget must be set. Zero executions runs only the seeds.
  std::optional<double> budget_seconds;
  std::optional<uint64_t> budget_executions;

  std::chrono::milliseconds statement_timeout{1000};
  std::chrono::milliseconds case_timeout{10000};
  sql::StrategyMix mix;
  uint64_t drop_interval = 512;  // 0 never drops
  uint32_t base_energy = 8;
  std::optional<uint64_t> rng_seed;
  std::string session;  // empty: derived at startup
  double stats_interval_seconds = 10;
  uint32_t max_restarts = 5;

  bool feedback = true;  // false: blackbox baseline
  bool dry_run = false;

  // Throws ConfigError naming the offending key.
  void Validate() const;
};

// `key=value` lines, `#` comments. Relative paths resolve against `base_dir`.
FuzzConfig ParseConfig(std::string_view text, const std::filesystem::path& base_dir = {});
FuzzConfig LoadConfig(const std::filesystem::path& path);

std::string DeriveSessionId();

}  // namespace sqlcov::fuzz

#endif  // SQLCOV_FUZZ_CONFIG_H_
