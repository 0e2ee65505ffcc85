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

#include "sqlcov/sql/mutator.h"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

#include "sqlcov/common/error.h"
#include "sqlcov/sql/lexer.h"
#include "sqlcov/sql/parser.h"

namespace sqlcov::sql {

namespace {

constexpr std::string_view kInterestingInts[] = {
    "0", "1", "2", "3", "4", "5", "7", "8", "16", "64", "127", "128", "255",
    "256", "1000", "65535", "65536", "2147483647", "2147483648", "4294967295",
    "4294967296", "9223372036854775807", "9223372036854775808",
    "18446744073709551615"};

constexpr std::string_view kInterestingStrings[] = {
    "''", "'a'", "'abc'", "'NULL'", "'%'", "'1'", "'-1'", "'it''s'",
    "'\xc3\xa9'",
    "'xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx'"};

constexpr std::string_view kDefaultNames[] = {"t", "u", "v", "a", "b", "c"};
constexpr std::string_view kDefaultFunctions[] = {
    "count", "sum", "min", "max", "abs", "length", "upper", "lower"};

// Operators sharing a precedence level can replace each other without
// changing how the text reparses.
constexpr std::string_view kComparisonOps[] = {"=", "<>", "!=", "<", ">", "<=", ">="};
constexpr std::string_view kAdditiveOps[] = {"+", "-", "||"};
constexpr std::string_view kMultiplicativeOps[] = {"*", "/", "%"};

constexpr std::string_view kSpliceableClauses[] = {
    "from", "where", "order_by", "limit", "set", "values", "column_list"};

template <typename T, size_t N>
std::string_view Pick(Rng& rng, const T (&items)[N]) {
  return items[Below(rng, N)];
}

template <size_t N>
bool Contains(const std::string_view (&items)[N], std::string_view s) {
  return std::find(std::begin(items), std::end(items), s) != std::end(items);
}

bool IsOperatorNode(const Node& n) {
  return n.kind == NodeKind::kExpression &&
         (n.tag == "binary" || n.tag == "unary" || n.tag == "is_null");
}

Node Leaf(NodeKind kind, std::string tag, std::string text) {
  Node n;
  n.kind = kind;
  n.tag = std::move(tag);
  n.text = std::move(text);
  return n;
}

Node Wrap(Node inner) {
  Node p;
  p.kind = NodeKind::kExpression;
  p.tag = "paren";
  p.children.push_back(MakeKeyword("("));
  p.children.push_back(std::move(inner));
  p.children.push_back(MakeKeyword(")"));
  return p;
}

struct Site {
  Node* node;
  Node* parent;
  size_t index;
};

void CollectSites(Node& n, Node* parent, size_t index, std::vector<Site>& out) {
  out.push_back({&n, parent, index});
  for (size_t i = 0; i < n.children.size(); ++i) CollectSites(n.children[i], &n, i, out);
}

void CollectNames(const Node& n, std::set<std::string>& names,
                  std::set<std::string>& functions) {
  if (n.kind == NodeKind::kIdentifier) {
    (n.tag == "function" ? functions : names).insert(n.text);
  }
  for (const auto& c : n.children) CollectNames(c, names, functions);
}

Node* ChildWithTag(Node& n, std::string_view tag) {
  for (auto& c : n.children)
    if (c.tag == tag) return &c;
  return nullptr;
}

class AstMutator {
 public:
  AstMutator(Ast& ast, const FragmentPool& pool, Rng& rng, const MutationOptions& options)
      : ast_(ast), pool_(pool), rng_(rng), options_(options) {
    std::set<std::string> names, functions;
    CollectNames(ast.root, names, functions);
    for (auto n : kDefaultNames) names.emplace(n);
    for (auto f : kDefaultFunctions) functions.emplace(f);
    for (const auto& f : options.function_names)
      if (!IsKeyword(f)) functions.insert(f);
    names_.assign(names.begin(), names.end());
    functions_.assign(functions.begin(), functions.end());
  }

  void Run() {
    int ops = 1 + static_cast<int>(Below(rng_, static_cast<uint64_t>(options_.max_ops)));
    for (int i = 0; i < ops; ++i) {
      Node before = ast_.root;
      for (int attempt = 0; attempt < 8; ++attempt) {
        if (ApplyOne()) break;
      }
      if (NodeCount(ast_.root) > options_.max_nodes) ast_.root = std::move(before);
    }
  }

 private:
  using Action = std::function<void()>;

  bool ApplyOne() {
    sites_.clear();
    CollectSites(ast_.root, nullptr, 0, sites_);
    std::vector<Action> actions;
    switch (Below(rng_, 4)) {
      case 0: Splices(actions); break;
      case 1: Deletions(actions); break;
      case 2: Duplications(actions); break;
      default: ValueMutations(actions); break;
    }
    if (actions.empty()) return false;
    actions[Below(rng_, actions.size())]();
    return true;
  }

  Node DonorCopy(std::string_view tag) {
    return pool_.Donor(tag, Below(rng_, pool_.DonorCount(tag)));
  }

  size_t StatementCount() const { return ast_.root.children.size(); }

  void Splices(std::vector<Action>& actions) {
    if (pool_.empty()) return;
    const bool statements = pool_.DonorCount("statement") > 0;
    const bool expressions = pool_.DonorCount("expression") > 0;
    for (const Site& s : sites_) {
      Node* node = s.node;
      if (node->kind == NodeKind::kStatement) {
        if (statements) {
          actions.push_back([this, node] { *node = DonorCopy("statement"); });
          if (StatementCount() < options_.max_statements) {
            size_t at = s.index + 1;
            actions.push_back([this, at] {
              auto& list = ast_.root.children;
              list.insert(list.begin() + static_cast<ptrdiff_t>(at), DonorCopy("statement"));
            });
          }
        }
        for (auto tag : kSpliceableClauses) {
          if (!StatementAcceptsClause(node->tag, tag) || ChildWithTag(*node, tag) ||
              pool_.DonorCount(tag) == 0)
            continue;
          actions.push_back([this, node, tag] { InsertClause(*node, DonorCopy(tag)); });
        }
      } else if (node->kind == NodeKind::kClause && !node->is_list()) {
        if (pool_.DonorCount(node->tag) > 0) {
          actions.push_back([this, node] { *node = DonorCopy(node->tag); });
        }
      } else if (node->is_expression() && expressions) {
        Node* parent = s.parent;
        actions.push_back([this, node, parent] {
          Node donor = DonorCopy("expression");
          if (IsOperatorNode(*parent) && IsOperatorNode(donor)) donor = Wrap(std::move(donor));
          *node = std::move(donor);
        });
      }
    }
  }

  static void InsertClause(Node& statement, Node clause) {
    int rank = ClauseRank(clause.tag);
    auto& c = statement.children;
    auto it = std::find_if(c.begin(), c.end(), [&](const Node& child) {
      return child.kind == NodeKind::kClause && ClauseRank(child.tag) > rank;
    });
    c.insert(it, std::move(clause));
  }

  void Deletions(std::vector<Action>& actions) {
    for (const Site& s : sites_) {
      Node* node = s.node;
      Node* parent = s.parent;
      size_t index = s.index;
      if (node->kind == NodeKind::kStatement && StatementCount() >= 2) {
        actions.push_back([this, index] {
          ast_.root.children.erase(ast_.root.children.begin() + static_cast<ptrdiff_t>(index));
        });
      }
      if (node->kind == NodeKind::kClause && parent &&
          parent->kind == NodeKind::kStatement && IsOptionalClause(parent->tag, node->tag)) {
        actions.push_back([parent, index] {
          parent->children.erase(parent->children.begin() + static_cast<ptrdiff_t>(index));
        });
      }
      if (node->is_list() && node->children.size() >= 3) {
        for (size_t i = 0; i < node->children.size(); i += 2) {
          actions.push_back([node, i] {
            auto& c = node->children;
            // Remove the element and the comma after it, or before it when last.
            size_t first = i + 1 < c.size() ? i : i - 1;
            c.erase(c.begin() + static_cast<ptrdiff_t>(first),
                    c.begin() + static_cast<ptrdiff_t>(first + 2));
          });
        }
      }
      if (node->kind == NodeKind::kKeyword && parent &&
          ((parent->tag == "order_item" && (node->text == "ASC" || node->text == "DESC")) ||
           ((parent->tag == "add_column" || parent->tag == "drop_column") &&
            node->text == "COLUMN") ||
           (parent->tag == "is_null" && node->text == "NOT"))) {
        actions.push_back([parent, index] {
          parent->children.erase(parent->children.begin() + static_cast<ptrdiff_t>(index));
        });
      }
      if (node->kind == NodeKind::kExpression && node->tag == "binary") {
        actions.push_back([this, node] {
          Node operand = std::move(node->children[OneIn(rng_, 2) ? 0 : 2]);
          *node = std::move(operand);
        });
      }
      if (node->kind == NodeKind::kExpression && node->tag == "unary") {
        actions.push_back([node] {
          Node operand = std::move(node->children[1]);
          *node = std::move(operand);
        });
      }
      if (node->kind == NodeKind::kExpression && node->tag == "call" &&
          node->children.size() == 4) {
        actions.push_back([node] { node->children.erase(node->children.begin() + 2); });
      }
    }
  }

  void Duplications(std::vector<Action>& actions) {
    for (const Site& s : sites_) {
      Node* node = s.node;
      if (node->kind == NodeKind::kStatement && StatementCount() < options_.max_statements) {
        size_t index = s.index;
        actions.push_back([this, index] {
          auto& list = ast_.root.children;
          Node copy = list[index];
          list.insert(list.begin() + static_cast<ptrdiff_t>(index + 1), std::move(copy));
        });
      }
      if (node->is_list() && (node->children.size() + 1) / 2 < options_.max_list_elements) {
        for (size_t i = 0; i < node->children.size(); i += 2) {
          actions.push_back([node, i] {
            auto& c = node->children;
            Node copy = c[i];
            auto at = c.begin() + static_cast<ptrdiff_t>(i + 1);
            at = c.insert(at, MakeKeyword(","));
            c.insert(at + 1, std::move(copy));
          });
        }
      }
    }
  }

  std::string MutateInteger(std::string_view text) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    bool parsed = ec == std::errc() && ptr == text.data() + text.size();
    switch (parsed ? Below(rng_, 3) : 0) {
      case 1:
        if (value < UINT64_MAX) return std::to_string(value + 1);
        break;
      case 2:
        if (value > 0) return std::to_string(value - 1);
        break;
    }
    return std::string(Pick(rng_, kInterestingInts));
  }

  std::string OtherName(const std::vector<std::string>& pool, const std::string& current) {
    for (int i = 0; i < 4; ++i) {
      const std::string& pick = pool[Below(rng_, pool.size())];
      if (pick != current) return pick;
    }
    return pool[Below(rng_, pool.size())];
  }

  template <size_t N>
  void SwapWithin(std::vector<Action>& actions, Node* node,
                  const std::string_view (&ops)[N]) {
    if (!Contains(ops, node->text)) return;
    actions.push_back([this, node, &ops] { node->text = std::string(Pick(rng_, ops)); });
  }

  void ValueMutations(std::vector<Action>& actions) {
    for (const Site& s : sites_) {
      Node* node = s.node;
      Node* parent = s.parent;
      if (node->kind == NodeKind::kLiteral) {
        if (node->tag == "int" || node->tag == "count") {
          actions.push_back([this, node] { node->text = MutateInteger(node->text); });
        } else if (node->tag == "string") {
          actions.push_back(
              [this, node] { node->text = std::string(Pick(rng_, kInterestingStrings)); });
        }
      }
      if (node->is_expression() && node->is_leaf()) {
        // Change the kind of a primary: column, int, string or NULL.
        actions.push_back([this, node] {
          switch (Below(rng_, 4)) {
            case 0:
              *node = Leaf(NodeKind::kIdentifier, "column", OtherName(names_, node->text));
              break;
            case 1:
              *node = Leaf(NodeKind::kLiteral, "int", std::string(Pick(rng_, kInterestingInts)));
              break;
            case 2:
              *node = Leaf(NodeKind::kLiteral, "string",
                           std::string(Pick(rng_, kInterestingStrings)));
              break;
            default:
              *node = Leaf(NodeKind::kLiteral, "null", "NULL");
              break;
          }
        });
      }
      if (node->kind == NodeKind::kIdentifier) {
        const auto& pool = node->tag == "function" ? functions_ : names_;
        actions.push_back([this, node, &pool] { node->text = OtherName(pool, node->text); });
      }
      if (node->kind == NodeKind::kKeyword && parent) {
        if (parent->tag == "coldef") {
          actions.push_back(
              [node] { node->text = node->text == "INT" ? "TEXT" : "INT"; });
        } else if (parent->tag == "order_item") {
          actions.push_back(
              [node] { node->text = node->text == "ASC" ? "DESC" : "ASC"; });
        } else if (parent->tag == "binary" && s.index == 1) {
          SwapWithin(actions, node, kComparisonOps);
          SwapWithin(actions, node, kAdditiveOps);
          SwapWithin(actions, node, kMultiplicativeOps);
        }
      }
    }
  }

  Ast& ast_;
  const FragmentPool& pool_;
  Rng& rng_;
  const MutationOptions& options_;
  std::vector<std::string> names_;
  std::vector<std::string> functions_;
  std::vector<Site> sites_;
};

}  // namespace

Ast MutateAst(const Ast& ast, const FragmentPool& pool, Rng& rng,
              const MutationOptions& options) {
  Ast out = ast;
  AstMutator(out, pool, rng, options).Run();
  return out;
}

std::string DictionaryMutate(std::string_view text, const Dictionary& dict, Rng& rng) {
  if (dict.empty()) throw Error("dictionary mutation needs a nonempty dictionary");
  const std::vector<std::string> entries = dict.Entries();
  std::vector<std::string> tokens;
  for (const Token& t : Lex(text)) tokens.emplace_back(t.text);

  const int ops = 1 + static_cast<int>(Below(rng, 4));
  for (int i = 0; i < ops; ++i) {
    const std::string& entry = entries[Below(rng, entries.size())];
    switch (tokens.empty() ? 1 : Below(rng, 4)) {
      case 0:
        tokens[Below(rng, tokens.size())] = entry;
        break;
      case 1:
        tokens.insert(tokens.begin() + static_cast<ptrdiff_t>(Below(rng, tokens.size() + 1)),
                      entry);
        break;
      case 2:
        if (tokens.size() > 1)
          tokens.erase(tokens.begin() + static_cast<ptrdiff_t>(Below(rng, tokens.size())));
        break;
      default:
        if (tokens.size() > 1) {
          size_t at = Below(rng, tokens.size() - 1);
          std::swap(tokens[at], tokens[at + 1]);
        }
        break;
    }
  }
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace sqlcov::sql
