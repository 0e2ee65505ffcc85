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

#include "sqlcov/sql/parser.h"

#include <span>

#include "sqlcov/common/strings.h"
#include "sqlcov/sql/lexer.h"

namespace sqlcov::sql {

namespace {

void Position(std::string_view src, uint32_t offset, uint32_t& line, uint32_t& col) {
  line = 1;
  col = 1;
  for (uint32_t i = 0; i < offset && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

void Finish(Node& n) {
  if (n.children.empty()) return;
  n.span.begin = n.children.front().span.begin;
  n.span.end = n.children.back().span.end;
}

Node Interior(NodeKind kind, std::string tag, std::vector<Node> children) {
  Node n;
  n.kind = kind;
  n.tag = std::move(tag);
  n.children = std::move(children);
  Finish(n);
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const Token> tokens)
      : src_(src), toks_(tokens) {}

  size_t pos() const { return pos_; }
  bool AtEnd() const { return pos_ >= toks_.size(); }

  [[noreturn]] void Fail(const std::string& message) const {
    uint32_t offset = AtEnd() ? (toks_.empty() ? static_cast<uint32_t>(src_.size())
                                               : toks_.back().offset +
                                                     static_cast<uint32_t>(toks_.back().text.size()))
                              : toks_[pos_].offset;
    uint32_t line, col;
    Position(src_, offset, line, col);
    throw SyntaxError(message, line, col, offset);
  }

  [[noreturn]] void Unexpected(const char* wanted) const {
    if (AtEnd()) Fail(std::string("unexpected end of input, expected ") + wanted);
    Fail("unexpected '" + std::string(toks_[pos_].text) + "', expected " + wanted);
  }

  void ExpectEnd() const {
    if (!AtEnd()) Unexpected("end of statement");
  }

  bool PeekKeyword(std::string_view kw, size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() && toks_[i].kind == TokenKind::kKeyword &&
           ToUpper(toks_[i].text) == kw;
  }
  bool PeekSymbol(std::string_view sym, size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() && toks_[i].kind == TokenKind::kSymbol &&
           toks_[i].text == sym;
  }

  Node Take(NodeKind kind, std::string tag, std::string text) {
    const Token& t = toks_[pos_++];
    Node n;
    n.kind = kind;
    n.tag = std::move(tag);
    n.text = std::move(text);
    n.span = {t.offset, t.offset + static_cast<uint32_t>(t.text.size())};
    return n;
  }

  Node Keyword(std::string_view kw) {
    if (!PeekKeyword(kw)) Unexpected(std::string(kw).c_str());
    return Take(NodeKind::kKeyword, "", std::string(kw));
  }
  Node Symbol(std::string_view sym) {
    if (!PeekSymbol(sym)) Unexpected(("'" + std::string(sym) + "'").c_str());
    return Take(NodeKind::kKeyword, "", std::string(sym));
  }
  Node Identifier(const char* tag) {
    if (AtEnd() || toks_[pos_].kind != TokenKind::kIdentifier) Unexpected("an identifier");
    return Take(NodeKind::kIdentifier, tag, std::string(toks_[pos_].text));
  }

  // ---- statements -------------------------------------------------------

  Node Statement() {
    if (PeekKeyword("SELECT")) return Select();
    if (PeekKeyword("INSERT")) return Insert();
    if (PeekKeyword("UPDATE")) return Update();
    if (PeekKeyword("DELETE")) return Delete();
    if (PeekKeyword("CREATE")) return Create();
    if (PeekKeyword("DROP")) return Drop();
    if (PeekKeyword("ALTER")) return Alter();
    if (PeekKeyword("CALL")) return Call();
    Unexpected("a statement");
  }

  Node Select() {
    std::vector<Node> c;
    c.push_back(Keyword("SELECT"));
    c.push_back(List("select_list", [&] {
      if (PeekSymbol("*")) return Take(NodeKind::kKeyword, "", "*");
      return Expr();
    }));
    if (PeekKeyword("FROM")) c.push_back(From());
    if (PeekKeyword("WHERE")) c.push_back(Where());
    if (PeekKeyword("ORDER")) c.push_back(OrderBy());
    if (PeekKeyword("LIMIT")) c.push_back(Limit());
    return Interior(NodeKind::kStatement, "select", std::move(c));
  }

  Node Insert() {
    std::vector<Node> c;
    c.push_back(Keyword("INSERT"));
    c.push_back(Keyword("INTO"));
    c.push_back(Identifier("name"));
    if (PeekSymbol("(")) {
      std::vector<Node> cols;
      cols.push_back(Symbol("("));
      cols.push_back(List("ident_list", [&] { return Identifier("name"); }));
      cols.push_back(Symbol(")"));
      c.push_back(Interior(NodeKind::kClause, "column_list", std::move(cols)));
    }
    c.push_back(Values());
    return Interior(NodeKind::kStatement, "insert", std::move(c));
  }

  Node Update() {
    std::vector<Node> c;
    c.push_back(Keyword("UPDATE"));
    c.push_back(Identifier("name"));
    c.push_back(Set());
    if (PeekKeyword("WHERE")) c.push_back(Where());
    return Interior(NodeKind::kStatement, "update", std::move(c));
  }

  Node Delete() {
    std::vector<Node> c;
    c.push_back(Keyword("DELETE"));
    c.push_back(Keyword("FROM"));
    c.push_back(Identifier("name"));
    if (PeekKeyword("WHERE")) c.push_back(Where());
    return Interior(NodeKind::kStatement, "delete", std::move(c));
  }

  Node Create() {
    std::vector<Node> c;
    c.push_back(Keyword("CREATE"));
    c.push_back(Keyword("TABLE"));
    c.push_back(Identifier("name"));
    c.push_back(Symbol("("));
    c.push_back(List("coldef_list", [&] { return ColumnDef(); }));
    c.push_back(Symbol(")"));
    return Interior(NodeKind::kStatement, "create_table", std::move(c));
  }

  Node Drop() {
    std::vector<Node> c;
    c.push_back(Keyword("DROP"));
    c.push_back(Keyword("TABLE"));
    c.push_back(Identifier("name"));
    return Interior(NodeKind::kStatement, "drop_table", std::move(c));
  }

  Node Alter() {
    std::vector<Node> c;
    c.push_back(Keyword("ALTER"));
    c.push_back(Keyword("TABLE"));
    c.push_back(Identifier("name"));
    std::vector<Node> a;
    if (PeekKeyword("ADD")) {
      a.push_back(Keyword("ADD"));
      if (PeekKeyword("COLUMN")) a.push_back(Keyword("COLUMN"));
      a.push_back(ColumnDef());
      c.push_back(Interior(NodeKind::kClause, "add_column", std::move(a)));
    } else if (PeekKeyword("DROP")) {
      a.push_back(Keyword("DROP"));
      if (PeekKeyword("COLUMN")) a.push_back(Keyword("COLUMN"));
      a.push_back(Identifier("name"));
      c.push_back(Interior(NodeKind::kClause, "drop_column", std::move(a)));
    } else if (PeekKeyword("RENAME")) {
      a.push_back(Keyword("RENAME"));
      a.push_back(Keyword("TO"));
      a.push_back(Identifier("name"));
      c.push_back(Interior(NodeKind::kClause, "rename_table", std::move(a)));
    } else {
      Unexpected("ADD, DROP or RENAME");
    }
    return Interior(NodeKind::kStatement, "alter_table", std::move(c));
  }

  Node Call() {
    std::vector<Node> c;
    c.push_back(Keyword("CALL"));
    c.push_back(Identifier("function"));
    c.push_back(Symbol("("));
    if (!PeekSymbol(")")) c.push_back(List("expr_list", [&] { return Expr(); }));
    c.push_back(Symbol(")"));
    return Interior(NodeKind::kStatement, "call", std::move(c));
  }

  // ---- clauses ----------------------------------------------------------

  Node From() {
    std::vector<Node> c;
    c.push_back(Keyword("FROM"));
    c.push_back(Identifier("name"));
    return Interior(NodeKind::kClause, "from", std::move(c));
  }

  Node Where() {
    std::vector<Node> c;
    c.push_back(Keyword("WHERE"));
    c.push_back(Expr());
    return Interior(NodeKind::kClause, "where", std::move(c));
  }

  Node OrderBy() {
    std::vector<Node> c;
    c.push_back(Keyword("ORDER"));
    c.push_back(Keyword("BY"));
    c.push_back(List("order_list", [&] {
      std::vector<Node> item;
      item.push_back(Expr());
      if (PeekKeyword("ASC")) item.push_back(Keyword("ASC"));
      else if (PeekKeyword("DESC")) item.push_back(Keyword("DESC"));
      return Interior(NodeKind::kClause, "order_item", std::move(item));
    }));
    return Interior(NodeKind::kClause, "order_by", std::move(c));
  }

  Node Limit() {
    std::vector<Node> c;
    c.push_back(Keyword("LIMIT"));
    if (AtEnd() || toks_[pos_].kind != TokenKind::kInteger) Unexpected("an integer");
    c.push_back(Take(NodeKind::kLiteral, "count", std::string(toks_[pos_].text)));
    return Interior(NodeKind::kClause, "limit", std::move(c));
  }

  Node Values() {
    std::vector<Node> c;
    c.push_back(Keyword("VALUES"));
    c.push_back(List("row_list", [&] {
      std::vector<Node> row;
      row.push_back(Symbol("("));
      row.push_back(List("expr_list", [&] { return Expr(); }));
      row.push_back(Symbol(")"));
      return Interior(NodeKind::kClause, "row", std::move(row));
    }));
    return Interior(NodeKind::kClause, "values", std::move(c));
  }

  Node Set() {
    std::vector<Node> c;
    c.push_back(Keyword("SET"));
    c.push_back(List("assign_list", [&] {
      std::vector<Node> a;
      a.push_back(Identifier("name"));
      a.push_back(Symbol("="));
      a.push_back(Expr());
      return Interior(NodeKind::kClause, "assign", std::move(a));
    }));
    return Interior(NodeKind::kClause, "set", std::move(c));
  }

  Node ColumnDef() {
    std::vector<Node> c;
    c.push_back(Identifier("name"));
    if (PeekKeyword("INT")) c.push_back(Keyword("INT"));
    else if (PeekKeyword("TEXT")) c.push_back(Keyword("TEXT"));
    else Unexpected("a column type (INT or TEXT)");
    return Interior(NodeKind::kClause, "coldef", std::move(c));
  }

  template <typename F>
  Node List(const char* tag, F element) {
    std::vector<Node> c;
    c.push_back(element());
    while (PeekSymbol(",")) {
      c.push_back(Take(NodeKind::kKeyword, "", ","));
      c.push_back(element());
    }
    return Interior(NodeKind::kClause, tag, std::move(c));
  }

  // ---- expressions ------------------------------------------------------

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxNesting) p.Fail("expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  Node Expr() {
    DepthGuard guard(*this);
    return Or();
  }

  Node Binary(Node lhs, Node op, Node rhs) {
    std::vector<Node> c;
    c.push_back(std::move(lhs));
    c.push_back(std::move(op));
    c.push_back(std::move(rhs));
    return Interior(NodeKind::kExpression, "binary", std::move(c));
  }

  Node Or() {
    Node lhs = And();
    while (PeekKeyword("OR")) {
      Node op = Keyword("OR");
      lhs = Binary(std::move(lhs), std::move(op), And());
    }
    return lhs;
  }

  Node And() {
    Node lhs = Not();
    while (PeekKeyword("AND")) {
      Node op = Keyword("AND");
      lhs = Binary(std::move(lhs), std::move(op), Not());
    }
    return lhs;
  }

  Node Not() {
    if (PeekKeyword("NOT")) {
      DepthGuard guard(*this);
      std::vector<Node> c;
      c.push_back(Keyword("NOT"));
      c.push_back(Not());
      return Interior(NodeKind::kExpression, "unary", std::move(c));
    }
    return Comparison();
  }

  Node Comparison() {
    Node lhs = Additive();
    static constexpr std::string_view kOps[] = {"=", "<>", "!=", "<", ">", "<=", ">="};
    for (auto op : kOps) {
      if (PeekSymbol(op)) {
        Node o = Take(NodeKind::kKeyword, "", std::string(op));
        return Binary(std::move(lhs), std::move(o), Additive());
      }
    }
    if (PeekKeyword("IS")) {
      std::vector<Node> c;
      c.push_back(std::move(lhs));
      c.push_back(Keyword("IS"));
      if (PeekKeyword("NOT")) c.push_back(Keyword("NOT"));
      c.push_back(Keyword("NULL"));
      return Interior(NodeKind::kExpression, "is_null", std::move(c));
    }
    return lhs;
  }

  Node Additive() {
    Node lhs = Multiplicative();
    while (PeekSymbol("+") || PeekSymbol("-") || PeekSymbol("||")) {
      Node op = Take(NodeKind::kKeyword, "", std::string(toks_[pos_].text));
      lhs = Binary(std::move(lhs), std::move(op), Multiplicative());
    }
    return lhs;
  }

  Node Multiplicative() {
    Node lhs = Unary();
    while (PeekSymbol("*") || PeekSymbol("/") || PeekSymbol("%")) {
      Node op = Take(NodeKind::kKeyword, "", std::string(toks_[pos_].text));
      lhs = Binary(std::move(lhs), std::move(op), Unary());
    }
    return lhs;
  }

  Node Unary() {
    if (PeekSymbol("-")) {
      DepthGuard guard(*this);
      std::vector<Node> c;
      c.push_back(Take(NodeKind::kKeyword, "", "-"));
      c.push_back(Unary());
      return Interior(NodeKind::kExpression, "unary", std::move(c));
    }
    return Primary();
  }

  Node Primary() {
    if (AtEnd()) Unexpected("an expression");
    const Token& t = toks_[pos_];
    switch (t.kind) {
      case TokenKind::kInteger:
        return Take(NodeKind::kLiteral, "int", std::string(t.text));
      case TokenKind::kString:
        if (!t.complete) Fail("unterminated string literal");
        return Take(NodeKind::kLiteral, "string", std::string(t.text));
      case TokenKind::kKeyword:
        if (PeekKeyword("NULL")) return Take(NodeKind::kLiteral, "null", "NULL");
        break;
      case TokenKind::kIdentifier: {
        if (!PeekSymbol("(", 1)) return Identifier("column");
        std::vector<Node> c;
        c.push_back(Identifier("function"));
        c.push_back(Symbol("("));
        if (PeekSymbol("*")) c.push_back(Take(NodeKind::kKeyword, "", "*"));
        else if (!PeekSymbol(")")) c.push_back(List("expr_list", [&] { return Expr(); }));
        c.push_back(Symbol(")"));
        return Interior(NodeKind::kExpression, "call", std::move(c));
      }
      case TokenKind::kSymbol:
        if (t.text == "(") {
          std::vector<Node> c;
          c.push_back(Symbol("("));
          c.push_back(Expr());
          c.push_back(Symbol(")"));
          return Interior(NodeKind::kExpression, "paren", std::move(c));
        }
        break;
      case TokenKind::kUnknown:
        Fail("unexpected character '" + std::string(t.text) + "'");
    }
    Unexpected("an expression");
  }

 private:
  std::string_view src_;
  std::span<const Token> toks_;
  size_t pos_ = 0;
  int depth_ = 0;
};

// Statement groups: token ranges between top-level semicolons.
struct Group {
  size_t begin, end;
};

std::vector<Group> Groups(const std::vector<Token>& toks) {
  std::vector<Group> out;
  size_t start = 0;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind == TokenKind::kSymbol && toks[i].text == ";") {
      out.push_back({start, i});
      start = i + 1;
    }
  }
  out.push_back({start, toks.size()});
  return out;
}

bool ClauseStarter(const Token& t, std::string& which) {
  if (t.kind != TokenKind::kKeyword) return false;
  std::string up = ToUpper(t.text);
  if (up == "FROM" || up == "WHERE" || up == "ORDER" || up == "LIMIT" ||
      up == "SET" || up == "VALUES") {
    which = up;
    return true;
  }
  return false;
}

Node ParseClause(Parser& p, std::string_view which) {
  if (which == "FROM") return p.From();
  if (which == "WHERE") return p.Where();
  if (which == "ORDER") return p.OrderBy();
  if (which == "LIMIT") return p.Limit();
  if (which == "SET") return p.Set();
  return p.Values();
}

}  // namespace

Ast ParseStrict(std::string_view sql) {
  auto toks = Lex(sql);
  Ast ast;
  ast.root.kind = NodeKind::kScript;
  ast.root.tag = "script";
  if (toks.empty()) {
    Parser(sql, toks).Fail("empty input");
  }
  auto groups = Groups(toks);
  // A trailing `;` leaves one empty group at the end; allow it.
  if (groups.size() > 1 && groups.back().begin == groups.back().end) groups.pop_back();
  for (const auto& g : groups) {
    std::span<const Token> part(toks.data() + g.begin, g.end - g.begin);
    Parser p(sql, part);
    if (part.empty()) {
      std::span<const Token> at(toks.data() + g.begin, 1);
      Parser(sql, at).Fail("empty statement");
    }
    Node s = p.Statement();
    p.ExpectEnd();
    ast.root.children.push_back(std::move(s));
  }
  Finish(ast.root);
  return ast;
}

PartialParse ParseRecovering(std::string_view sql) {
  PartialParse out;
  auto toks = Lex(sql);
  for (const auto& g : Groups(toks)) {
    if (g.begin == g.end) continue;
    std::span<const Token> part(toks.data() + g.begin, g.end - g.begin);
    try {
      Parser p(sql, part);
      Node s = p.Statement();
      p.ExpectEnd();
      out.subtrees.push_back(std::move(s));
      continue;
    } catch (const SyntaxError& e) {
      out.diagnostics.push_back({e.detail(), e.line(), e.column()});
    }
    std::string which;
    for (size_t i = 0; i < part.size();) {
      if (!ClauseStarter(part[i], which)) {
        ++i;
        continue;
      }
      Parser p(sql, part.subspan(i));
      try {
        out.subtrees.push_back(ParseClause(p, which));
        i += p.pos();
      } catch (const SyntaxError&) {
        ++i;
      }
    }
  }
  return out;
}

std::variant<Ast, PartialParse> Parse(std::string_view sql, ParseMode mode) {
  if (mode == ParseMode::kStrict) return ParseStrict(sql);
  return ParseRecovering(sql);
}

Node ParseAs(std::string_view tag, std::string_view text) {
  auto toks = Lex(text);
  Parser p(text, toks);
  Node n;
  if (tag == "from") n = p.From();
  else if (tag == "where") n = p.Where();
  else if (tag == "order_by") n = p.OrderBy();
  else if (tag == "limit") n = p.Limit();
  else if (tag == "set") n = p.Set();
  else if (tag == "values") n = p.Values();
  else if (tag == "expression") n = p.Expr();
  else {
    n = p.Statement();
    if (n.tag != tag) p.Fail("expected a " + std::string(tag) + " statement");
  }
  p.ExpectEnd();
  return n;
}

bool StatementAcceptsClause(std::string_view statement, std::string_view clause) {
  if (statement == "select")
    return clause == "from" || clause == "where" || clause == "order_by" || clause == "limit";
  if (statement == "update") return clause == "set" || clause == "where";
  if (statement == "delete") return clause == "where";
  if (statement == "insert") return clause == "values" || clause == "column_list";
  return false;
}

int ClauseRank(std::string_view clause) {
  if (clause == "select_list") return 0;
  if (clause == "from" || clause == "set" || clause == "column_list") return 1;
  if (clause == "where" || clause == "values") return 2;
  if (clause == "order_by") return 3;
  if (clause == "limit") return 4;
  return 5;
}

bool IsOptionalClause(std::string_view statement, std::string_view clause) {
  if (statement == "select")
    return clause == "from" || clause == "where" || clause == "order_by" || clause == "limit";
  if (statement == "update" || statement == "delete") return clause == "where";
  if (statement == "insert") return clause == "column_list";
  return false;
}

}  // namespace sqlcov::sql
