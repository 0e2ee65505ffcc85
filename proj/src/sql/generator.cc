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

#include "sqlcov/sql/generator.h"

#include <algorithm>
#include <cmath>

#include "sqlcov/common/error.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/sql/lexer.h"
#include "sqlcov/sql/parser.h"

namespace sqlcov::sql {

std::string_view StrategyName(Strategy strategy) {
  return strategy == Strategy::kAstMutation ? "ast" : "dictionary";
}

std::string TestCase::Text() const { return JoinStatements(statements); }

void StrategyMix::Validate() const {
  if (!(ast >= 0 && ast <= 1 && dictionary >= 0 && dictionary <= 1) ||
      std::fabs(ast + dictionary - 1.0) > 1e-9) {
    throw Error("strategy weights must be in [0, 1] and sum to 1");
  }
}

namespace {

std::vector<std::string> DictionaryPath(const std::vector<std::string>& parent,
                                        const Dictionary& dict, Rng& rng) {
  const std::string text = JoinStatements(parent);
  for (int attempt = 0; attempt < 8; ++attempt) {
    auto statements = SplitStatements(DictionaryMutate(text, dict, rng));
    if (!statements.empty()) return statements;
  }
  return parent;
}

}  // namespace

TestCase GenerateFromSeed(const GeneratorInputs& in, uint64_t seed) {
  in.mix.Validate();
  TestCase out;
  out.provenance.parent_id = in.parent_id;
  out.provenance.seed = seed;
  Rng rng(seed);
  const bool want_ast = UnitInterval(rng) < in.mix.ast;
  if (want_ast) {
    try {
      Ast parent = ParseStrict(JoinStatements(*in.parent));
      Ast mutant = MutateAst(parent, *in.pool, rng, in.mutation);
      out.provenance.strategy = Strategy::kAstMutation;
      out.statements = SerializeStatements(mutant);
      try {
        ParseStrict(Serialize(mutant));
      } catch (const SyntaxError&) {
        out.provenance.relaxed = true;
      }
      return out;
    } catch (const SyntaxError&) {
      out.provenance.fell_back = true;
    }
  }
  out.provenance.strategy = Strategy::kDictionaryMutation;
  out.statements = DictionaryPath(*in.parent, *in.dictionary, rng);
  return out;
}

TestCase Generate(const GeneratorInputs& in, Rng& rng) {
  return GenerateFromSeed(in, rng());
}

std::vector<Fragment> HarvestFragments(const TestCase& test_case, bool interesting) {
  if (!interesting) return {};
  return HarvestStatements(test_case.statements);
}

std::vector<SeedCase> LoadSeedCorpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("seed corpus is not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".sql") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SeedCase> out;
  for (const auto& f : files) {
    auto statements = SplitStatements(ReadFile(f.string()));
    if (!statements.empty()) out.push_back({f, std::move(statements)});
  }
  return out;
}

}  // namespace sqlcov::sql
