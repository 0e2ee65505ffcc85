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

#include <algorithm>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "sqlcov/common/error.h"
#include "sqlcov/common/rng.h"
#include "sqlcov/sql/ast.h"
#include "sqlcov/sql/dictionary.h"
#include "sqlcov/sql/fragments.h"
#include "sqlcov/sql/generator.h"
#include "sqlcov/sql/lexer.h"
#include "sqlcov/sql/mutator.h"
#include "sqlcov/sql/parser.h"

namespace sqlcov::sql {
namespace {

bool ValidUtf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t n = c < 0x80 ? 1 : (c & 0xe0) == 0xc0 ? 2 : (c & 0xf0) == 0xe0 ? 3
                                                 : (c & 0xf8) == 0xf0   ? 4
                                                                        : 0;
    if (n == 0 || i + n > s.size()) return false;
    for (size_t k = 1; k < n; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) return false;
    i += n;
  }
  return true;
}

bool StrictlyParses(const std::string& text) {
  try {
    ParseStrict(text);
    return true;
  } catch (const SyntaxError&) {
    return false;
  }
}

void ExpectRoundTrip(const Ast& ast) {
  std::string text = Serialize(ast);
  Ast again = ParseStrict(text);
  EXPECT_TRUE(StructurallyEqual(ast.root, again.root)) << text;
  EXPECT_EQ(Serialize(again), text);
}

std::vector<SeedCase> Seeds() { return LoadSeedCorpus(SQLCOV_DATA_DIR "/seeds"); }

FragmentPool SeedPool() {
  FragmentPool pool;
  for (const auto& seed : Seeds()) pool.InsertAll(HarvestStatements(seed.statements));
  return pool;
}

TEST(LexerTest, ClassifiesTokens) {
  auto toks = Lex("select a1, 'it''s' <> 42 -- trailing\n;");
  ASSERT_EQ(toks.size(), 7u);
  EXPECT_EQ(toks[0].kind, TokenKind::kKeyword);
  EXPECT_EQ(toks[1].kind, TokenKind::kIdentifier);
  EXPECT_EQ(toks[3].kind, TokenKind::kString);
  EXPECT_EQ(toks[3].text, "'it''s'");
  EXPECT_EQ(toks[4].text, "<>");
  EXPECT_EQ(toks[5].kind, TokenKind::kInteger);
  EXPECT_EQ(toks[6].text, ";");
}

TEST(LexerTest, UnterminatedStringAndUnknownBytes) {
  auto toks = Lex("'abc");
  ASSERT_EQ(toks.size(), 1u);
  EXPECT_FALSE(toks[0].complete);
  toks = Lex("\xc3\xa9 ?");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[0].kind, TokenKind::kUnknown);
  EXPECT_EQ(toks[0].text.size(), 2u);
}

TEST(LexerTest, SplitStatementsIgnoresQuotedSemicolons) {
  auto parts = SplitStatements("SELECT 'a;b';  ; SELECT 2");
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0], "SELECT 'a;b'");
  EXPECT_EQ(parts[1], "SELECT 2");
  EXPECT_EQ(JoinStatements(parts), "SELECT 'a;b'; SELECT 2;");
}

TEST(ParserTest, SingleSelect) {
  Ast ast = ParseStrict("SELECT 1;");
  ASSERT_EQ(ast.root.children.size(), 1u);
  EXPECT_EQ(ast.root.children[0].kind, NodeKind::kStatement);
  EXPECT_EQ(ast.root.children[0].tag, "select");
}

TEST(ParserTest, EmptyInputIsSyntaxError) {
  EXPECT_THROW(ParseStrict(""), SyntaxError);
  EXPECT_THROW(ParseStrict("  -- only a comment\n"), SyntaxError);
  EXPECT_THROW(ParseStrict(";"), SyntaxError);
}

TEST(ParserTest, ErrorCarriesLocation) {
  try {
    ParseStrict("SELECT 1;\nSELECT FROM t;");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 8u);
    EXPECT_EQ(e.offset(), 17u);
  }
}

TEST(ParserTest, RecoveringKeepsParseableStatements) {
  PartialParse p = ParseRecovering("SELECT 1; CREATE GLORP x; SELECT 2;");
  ASSERT_EQ(p.subtrees.size(), 2u);
  EXPECT_EQ(p.subtrees[0].tag, "select");
  EXPECT_EQ(p.subtrees[1].tag, "select");
  EXPECT_EQ(p.diagnostics.size(), 1u);
}

TEST(ParserTest, RecoveringSalvagesClauses) {
  PartialParse p = ParseRecovering("SELECT a FROM t GROUP BY a WHERE a > 1 ORDER BY a");
  std::vector<std::string> tags;
  for (const auto& n : p.subtrees) tags.push_back(n.tag);
  EXPECT_EQ(tags, (std::vector<std::string>{"from", "where", "order_by"}));
  EXPECT_EQ(p.diagnostics.size(), 1u);
}

TEST(ParserTest, ParseDispatchesOnMode) {
  auto strict = Parse("SELECT 1", ParseMode::kStrict);
  EXPECT_TRUE(std::holds_alternative<Ast>(strict));
  auto partial = Parse("BOGUS", ParseMode::kRecovering);
  ASSERT_TRUE(std::holds_alternative<PartialParse>(partial));
  EXPECT_TRUE(std::get<PartialParse>(partial).subtrees.empty());
}

TEST(ParserTest, KeywordsAreUpperCased) {
  Ast ast = ParseStrict("select a from t where b is not null order by a desc limit 3");
  EXPECT_EQ(Serialize(ast), "SELECT a FROM t WHERE b IS NOT NULL ORDER BY a DESC LIMIT 3;");
}

TEST(ParserTest, PrecedenceShapesTree) {
  Ast ast = ParseStrict("SELECT 1 + 2 * 3 = 7 OR NOT a AND b");
  const Node& item = ast.root.children[0].children[1].children[0];
  ASSERT_EQ(item.tag, "binary");
  EXPECT_EQ(item.children[1].text, "OR");
  const Node& eq = item.children[0];
  EXPECT_EQ(eq.children[1].text, "=");
  EXPECT_EQ(eq.children[0].children[1].text, "+");
  EXPECT_EQ(eq.children[0].children[2].children[1].text, "*");
  EXPECT_EQ(item.children[2].children[1].text, "AND");
  EXPECT_EQ(item.children[2].children[0].tag, "unary");
}

TEST(ParserTest, SpansStayInsideSource) {
  const std::string src = "CREATE TABLE t (a INT);  INSERT INTO t VALUES (1), (2)";
  Ast ast = ParseStrict(src);
  std::function<void(const Node&)> check = [&](const Node& n) {
    EXPECT_LE(n.span.begin, n.span.end);
    EXPECT_LE(n.span.end, src.size());
    if (n.is_leaf() && n.kind != NodeKind::kKeyword) {
      EXPECT_EQ(src.substr(n.span.begin, n.span.end - n.span.begin), n.text);
    }
    for (const auto& c : n.children) check(c);
  };
  check(ast.root);
}

TEST(ParserTest, NestingLimit) {
  std::string ok(kMaxNesting - 1, '(');
  ok = "SELECT " + ok + "1" + std::string(kMaxNesting - 1, ')');
  EXPECT_NO_THROW(ParseStrict(ok));
  std::string deep = "SELECT " + std::string(200, '(') + "1" + std::string(200, ')');
  EXPECT_THROW(ParseStrict(deep), SyntaxError);
}

TEST(ParserTest, RejectsOutsideSubset) {
  for (const char* bad : {"SELECT a FROM t GROUP BY a", "SELECT 'abc", "CREATE TABLE t (a REAL)",
                          "SELECT 1 2", "INSERT INTO t VALUES ()", "SELECT a FROM t LIMIT x",
                          "SELECT ?", "ALTER TABLE t MODIFY a"}) {
    EXPECT_FALSE(StrictlyParses(bad)) << bad;
  }
}

TEST(ParserTest, ParseAsChecksNonterminal) {
  EXPECT_EQ(ParseAs("where", "WHERE a = 1").tag, "where");
  EXPECT_EQ(ParseAs("select", "SELECT 1").tag, "select");
  EXPECT_EQ(ParseAs("expression", "a + 1").tag, "binary");
  EXPECT_THROW(ParseAs("delete", "SELECT 1"), SyntaxError);
  EXPECT_THROW(ParseAs("where", "WHERE a = 1 LIMIT 2"), SyntaxError);
}

TEST(RoundTripTest, SeedCorpus) {
  auto seeds = Seeds();
  ASSERT_GE(seeds.size(), 20u);
  for (const auto& seed : seeds) {
    SCOPED_TRACE(seed.path.string());
    Ast ast = ParseStrict(JoinStatements(seed.statements));
    ExpectRoundTrip(ast);
  }
}

TEST(RoundTripTest, Handwritten) {
  for (const char* sql : {
           "SELECT count(*), f(), g(1, 'x') FROM t ORDER BY 1 ASC, b",
           "SELECT - - 1, 1 - -1, (a || 'b') || c",
           "ALTER TABLE t ADD x TEXT; ALTER TABLE t DROP COLUMN x; ALTER TABLE t RENAME TO u",
           "INSERT INTO t (a, b) VALUES (1, NULL), (2, 'q''')",
           "UPDATE t SET a = a % 3, b = 'x' WHERE NOT a IS NULL",
           "CALL cancel_backend(0); DROP TABLE t; DELETE FROM t",
           "SELECT a <> b, a != b, a <= b, a >= b FROM t WHERE (a)"}) {
    SCOPED_TRACE(sql);
    ExpectRoundTrip(ParseStrict(sql));
  }
}

TEST(FragmentPoolTest, DedupAndFifoEviction) {
  FragmentPool pool(3);
  auto f = [](const char* sql) { return MakeFragment(ParseAs("select", sql)); };
  EXPECT_TRUE(pool.Insert(f("SELECT 1")));
  EXPECT_FALSE(pool.Insert(f("SELECT 1")));
  EXPECT_TRUE(pool.Insert(f("SELECT 2")));
  EXPECT_TRUE(pool.Insert(f("SELECT 3")));
  EXPECT_EQ(pool.DonorCount("statement"), 3u);
  EXPECT_TRUE(pool.Insert(f("SELECT 4")));
  EXPECT_EQ(pool.size(), 3u);
  EXPECT_FALSE(pool.Contains(f("SELECT 1").origin_digest));
  EXPECT_EQ(Serialize(pool.fragments().front().subtree), "SELECT 2");
  EXPECT_EQ(pool.DonorCount("statement"), 3u);
  EXPECT_EQ(Serialize(pool.Donor("statement", 0)), "SELECT 2");
  // The evicted fragment can come back.
  EXPECT_TRUE(pool.Insert(f("SELECT 1")));
}

TEST(FragmentPoolTest, IndexesNestedDonors) {
  FragmentPool pool;
  pool.Insert(MakeFragment(ParseAs("select", "SELECT a + 1 FROM t WHERE b")));
  EXPECT_EQ(pool.DonorCount("statement"), 1u);
  EXPECT_EQ(pool.DonorCount("from"), 1u);
  EXPECT_EQ(pool.DonorCount("where"), 1u);
  // a + 1, a, 1, b
  EXPECT_EQ(pool.DonorCount("expression"), 4u);
}

TEST(HarvestTest, Examples) {
  TestCase tc{{"SELECT 1", "BOGUS"}, {}};
  auto fragments = HarvestFragments(tc, true);
  ASSERT_EQ(fragments.size(), 1u);
  EXPECT_EQ(fragments[0].subtree.tag, "select");
  EXPECT_TRUE(HarvestFragments(tc, false).empty());

  FragmentPool pool;
  pool.InsertAll(HarvestFragments(tc, true));
  EXPECT_EQ(pool.size(), 1u);
  pool.InsertAll(HarvestFragments(tc, true));
  EXPECT_EQ(pool.size(), 1u);
}

TEST(HarvestTest, PooledFragmentsReparseUnderOwnNonterminal) {
  Rng rng(7);
  FragmentPool pool = SeedPool();
  Dictionary dict = DefaultDictionary();
  // Grow the pool with broken mutants too.
  auto seeds = Seeds();
  for (int i = 0; i < 500; ++i) {
    const auto& seed = seeds[Below(rng, seeds.size())];
    std::string text = DictionaryMutate(JoinStatements(seed.statements), dict, rng);
    pool.InsertAll(HarvestStatements(SplitStatements(text)));
  }
  ASSERT_GT(pool.size(), 50u);
  for (const auto& f : pool.fragments()) {
    std::string text = Serialize(f.subtree);
    std::string tag = f.subtree.tag;
    Node again = ParseAs(tag, text);
    EXPECT_TRUE(StructurallyEqual(again, f.subtree)) << tag << ": " << text;
  }
}

TEST(MutatorTest, DeterministicForFixedSeed) {
  FragmentPool pool = SeedPool();
  Ast parent = ParseStrict("CREATE TABLE t (a INT); SELECT a FROM t WHERE a > 1 ORDER BY a");
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng r1(seed), r2(seed);
    EXPECT_EQ(Serialize(MutateAst(parent, pool, r1)), Serialize(MutateAst(parent, pool, r2)));
  }
}

TEST(MutatorTest, SplicesWhereIntoSelectWithoutOne) {
  FragmentPool pool;
  pool.Insert(MakeFragment(ParseAs("where", "WHERE zz = 42")));
  Ast host = ParseStrict("SELECT a FROM t");
  bool found = false;
  for (uint64_t seed = 0; seed < 2000 && !found; ++seed) {
    Rng rng(seed);
    MutationOptions one;
    one.max_ops = 1;
    std::string out = Serialize(MutateAst(host, pool, rng, one));
    if (out.find("WHERE zz = 42") != std::string::npos) {
      found = true;
      EXPECT_EQ(out, "SELECT a FROM t WHERE zz = 42;");
    }
  }
  EXPECT_TRUE(found);
}

TEST(MutatorTest, EmptyPoolChainNeverAborts) {
  FragmentPool empty;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Ast ast = ParseStrict("CREATE TABLE t (a INT, b TEXT); INSERT INTO t VALUES (1, 'x');"
                          "SELECT a + 1, b FROM t WHERE a > 0 ORDER BY a LIMIT 2");
    for (int i = 0; i < 100; ++i) {
      ast = MutateAst(ast, empty, rng);
      std::string text = Serialize(ast);
      ASSERT_FALSE(text.empty());
      ASSERT_TRUE(ValidUtf8(text));
      ASSERT_LE(NodeCount(ast.root), MutationOptions{}.max_nodes);
    }
  }
}

// Mutants that reparse must reparse to the same tree: the operators keep
// precedence and list shape intact.
TEST(MutatorTest, ReparseableMutantsRoundTrip) {
  FragmentPool pool = SeedPool();
  auto seeds = Seeds();
  Rng rng(11);
  int reparsed = 0;
  for (int i = 0; i < 3000; ++i) {
    Ast parent = ParseStrict(JoinStatements(seeds[Below(rng, seeds.size())].statements));
    Ast mutant = MutateAst(parent, pool, rng);
    std::string text = Serialize(mutant);
    if (!StrictlyParses(text)) continue;
    ++reparsed;
    Ast again = ParseStrict(text);
    ASSERT_TRUE(StructurallyEqual(mutant.root, again.root)) << text;
  }
  EXPECT_GT(reparsed, 2700);
}

TEST(DictionaryTest, ParsesFileFormat) {
  Dictionary d = ParseDictionary("# comment\nSELECT\n  union  # trailing\nINT\nfoo\n(\n\n");
  EXPECT_EQ(d.keywords, (std::set<std::string>{"(", "SELECT", "union"}));
  EXPECT_EQ(d.function_names, (std::set<std::string>{"foo"}));
  EXPECT_EQ(d.type_names, (std::set<std::string>{"INT"}));
  EXPECT_THROW(ParseDictionary("SELECT 1\n"), ParseError);
  EXPECT_THROW(ParseDictionary("--\n"), ParseError);
}

TEST(DictionaryTest, ShippedFileMatchesDefault) {
  Dictionary file = LoadDictionary(SQLCOV_DATA_DIR "/sql.dict");
  Dictionary def = DefaultDictionary();
  EXPECT_EQ(file.function_names, def.function_names);
  EXPECT_EQ(file.type_names, def.type_names);
  for (const auto& k : def.keywords) EXPECT_TRUE(file.keywords.count(k)) << k;
}

TEST(DictionaryMutateTest, InsertExample) {
  Dictionary dict;
  dict.keywords = {"UNION"};
  // Find a seed whose single operator inserts after the first token.
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    if (DictionaryMutate("SELECT 1", dict, rng) == "SELECT UNION 1") {
      Rng replay(seed);
      EXPECT_EQ(DictionaryMutate("SELECT 1", dict, replay), "SELECT UNION 1");
      return;
    }
  }
  FAIL() << "no seed produced the insert";
}

TEST(DictionaryMutateTest, EmptyDictionaryRefused) {
  Rng rng(1);
  EXPECT_THROW(DictionaryMutate("SELECT 1", Dictionary{}, rng), Error);
}

TEST(DictionaryMutateTest, RobustnessSweep) {
  Dictionary dict = DefaultDictionary();
  dict.keywords.insert("\xc3\xa9");
  auto seeds = Seeds();
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    std::string text = JoinStatements(seeds[i % seeds.size()].statements);
    if (i % 3 == 0) text += " '\xe2\x82\xac";
    std::string out = DictionaryMutate(text, dict, rng);
    ASSERT_TRUE(ValidUtf8(out)) << out;
    auto toks = Lex(out);
    ASSERT_FALSE(toks.empty());
    PartialParse partial = ParseRecovering(out);
    (void)partial;
  }
}

TEST(GeneratorTest, ProvenanceFollowsWeights) {
  FragmentPool pool = SeedPool();
  Dictionary dict = DefaultDictionary();
  std::vector<std::string> good = {"SELECT a FROM t"};
  std::vector<std::string> broken = {"SELECT a FROM t GROUP BY a"};
  GeneratorInputs in;
  in.pool = &pool;
  in.dictionary = &dict;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    in.mix = {1.0, 0.0};
    in.parent = &good;
    TestCase a = Generate(in, rng);
    EXPECT_EQ(a.provenance.strategy, Strategy::kAstMutation);
    EXPECT_FALSE(a.provenance.fell_back);

    in.parent = &broken;
    TestCase b = Generate(in, rng);
    EXPECT_EQ(b.provenance.strategy, Strategy::kDictionaryMutation);
    EXPECT_TRUE(b.provenance.fell_back);

    in.mix = {0.0, 1.0};
    in.parent = &good;
    TestCase c = Generate(in, rng);
    EXPECT_EQ(c.provenance.strategy, Strategy::kDictionaryMutation);
    EXPECT_FALSE(c.provenance.fell_back);
  }
}

TEST(GeneratorTest, RejectsBadWeights) {
  EXPECT_THROW((StrategyMix{0.5, 0.6}.Validate()), Error);
  EXPECT_THROW((StrategyMix{-0.1, 1.1}.Validate()), Error);
  EXPECT_NO_THROW((StrategyMix{0.25, 0.75}.Validate()));
}

TEST(GeneratorTest, DeterministicAndReplayableFromProvenance) {
  FragmentPool pool = SeedPool();
  Dictionary dict = DefaultDictionary();
  auto seeds = Seeds();
  Rng r1(99), r2(99);
  for (int i = 0; i < 300; ++i) {
    GeneratorInputs in;
    in.parent_id = static_cast<uint64_t>(i % seeds.size());
    in.parent = &seeds[in.parent_id].statements;
    in.pool = &pool;
    in.dictionary = &dict;
    TestCase a = Generate(in, r1);
    TestCase b = Generate(in, r2);
    EXPECT_EQ(a.statements, b.statements);
    TestCase c = GenerateFromSeed(in, a.provenance.seed);
    EXPECT_EQ(a.statements, c.statements);
    EXPECT_EQ(c.provenance.parent_id, in.parent_id);
  }
}

TEST(GeneratorTest, LivenessAndValidityLift) {
  FragmentPool pool = SeedPool();
  Dictionary dict = DefaultDictionary();
  auto seeds = Seeds();
  Rng rng(2024);
  int ast_total = 0, ast_valid = 0, dict_total = 0, dict_valid = 0;
  for (int i = 0; i < 2000; ++i) {
    GeneratorInputs in;
    in.parent = &seeds[i % seeds.size()].statements;
    in.pool = &pool;
    in.dictionary = &dict;
    TestCase tc = Generate(in, rng);
    ASSERT_FALSE(tc.statements.empty());
    bool valid = StrictlyParses(tc.Text());
    if (tc.provenance.strategy == Strategy::kAstMutation) {
      ++ast_total;
      ast_valid += valid;
      EXPECT_EQ(tc.provenance.relaxed, !valid);
    } else {
      ++dict_total;
      dict_valid += valid;
    }
  }
  ASSERT_GT(ast_total, 0);
  ASSERT_GT(dict_total, 0);
  double ast_rate = double(ast_valid) / ast_total;
  double dict_rate = double(dict_valid) / dict_total;
  EXPECT_GE(ast_rate, 2 * dict_rate) << ast_rate << " vs " << dict_rate;
}

TEST(SeedCorpusTest, LoadsSortedSqlFiles) {
  auto seeds = Seeds();
  ASSERT_FALSE(seeds.empty());
  EXPECT_TRUE(std::is_sorted(seeds.begin(), seeds.end(),
                             [](const SeedCase& a, const SeedCase& b) { return a.path < b.path; }));
  EXPECT_THROW(LoadSeedCorpus("/nonexistent/dir"), Error);
}

}  // namespace
}  // namespace sqlcov::sql
