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

#ifndef SQLCOV_SQL_GENERATOR_H_
#define SQLCOV_SQL_GENERATOR_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sqlcov/common/rng.h"
#include "sqlcov/sql/dictionary.h"
#include "sqlcov/sql/fragments.h"
#include "sqlcov/sql/mutator.h"

namespace sqlcov::sql {

enum class Strategy : uint8_t { kAstMutation, kDictionaryMutation };

std::string_view StrategyName(Strategy strategy);

struct Provenance {
  Strategy strategy = Strategy::kAstMutation;
  uint64_t parent_id = 0;
  uint64_t seed = 0;
  // The AST strategy was drawn but the parent does not parse.
  bool fell_back = false;
  // The AST mutant does not strictly reparse and is emitted as text anyway.
  bool relaxed = false;
};

struct TestCase {
  std::vector<std::string> statements;  // never empty
  Provenance provenance;

  std::string Text() const;
};

struct StrategyMix {
  double ast = 0.7;
  double dictionary = 0.3;

  // Throws Error unless both weights are in [0, 1] and sum to 1.
  void Validate() const;
};

struct GeneratorInputs {
  uint64_t parent_id = 0;
  const std::vector<std::string>* parent = nullptr;  // nonempty
  StrategyMix mix;
  const FragmentPool* pool = nullptr;
  const Dictionary* dictionary = nullptr;
  MutationOptions mutation;
};

// Draws a seed from `rng` and derives the case from it. Always returns a
// case; the result depends only on the inputs and the drawn seed.
TestCase Generate(const GeneratorInputs& in, Rng& rng);
// Re-derives the case recorded with `seed`.
TestCase GenerateFromSeed(const GeneratorInputs& in, uint64_t seed);

// Statement and clause fragments of an interesting case; none otherwise.
std::vector<Fragment> HarvestFragments(const TestCase& test_case, bool interesting);

struct SeedCase {
  std::filesystem::path path;
  std::vector<std::string> statements;
};

// Every `.sql` file in `dir`, sorted by file name. Files without statements
// are skipped. Throws Error when `dir` is not a directory.
std::vector<SeedCase> LoadSeedCorpus(const std::filesystem::path& dir);

}  // namespace sqlcov::sql

#endif  // SQLCOV_SQL_GENERATOR_H_
