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

// Query server of the toy database: parses each statement, checks it
// against a mirror of the catalog and forwards the planned statement to the
// storage worker. CALL analyze(t) runs in a forked worker process.

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crash.h"
#include "instrument.h"
#include "manifests.h"
#include "server.h"
#include "tree.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/sql/parser.h"
#include "value.h"

namespace sqlcov::toydb {

namespace {

const Function kHandleRequest(
    "HandleRequest",
    {"entry", "syntax_error", "multi_statement", "dispatch_select", "dispatch_insert",
     "dispatch_update", "dispatch_delete", "dispatch_create", "dispatch_drop", "dispatch_alter",
     "dispatch_call", "analysis_error", "forward", "storage_rows", "storage_error",
     "storage_lost", "catalog_update"});
const Function kAnalyzeExpr(
    "AnalyzeExpr",
    {"entry", "int", "int_range", "string", "null", "column", "no_table", "column_unknown",
     "paren", "neg", "not", "operand_type", "is_null", "logic", "compare", "compare_mismatch",
     "concat", "arith", "call"});
const Function kAnalyzeCall("AnalyzeCall",
                            {"entry", "aggregate", "aggregate_misplaced", "aggregate_nested",
                             "star", "arity", "aggregate_arg", "arg_type", "scalar",
                             "scalar_arg", "unknown"});
const Function kAnalyzeSelect(
    "AnalyzeSelect",
    {"entry", "order_item", "order_positional", "order_range_error", "order_resolve",
     "from", "unknown_table", "no_from", "star", "star_without_from", "item", "item_error",
     "mixed_aggregate", "where", "where_error", "order_expr", "order_error", "limit",
     "limit_error", "done"});
const Function kAnalyzeInsert("AnalyzeInsert",
                              {"entry", "unknown_table", "column_list", "unknown_column",
                               "duplicate_column", "row", "arity_error", "value",
                               "value_error", "type_error", "done"});
const Function kAnalyzeUpdate("AnalyzeUpdate",
                              {"entry", "unknown_table", "assign", "unknown_column",
                               "assign_error", "type_error", "where", "where_error", "done"});
const Function kAnalyzeDelete("AnalyzeDelete",
                              {"entry", "unknown_table", "where", "where_error", "done"});
const Function kAnalyzeCreate("AnalyzeCreate", {"entry", "exists", "too_many_tables", "column",
                                                "duplicate_column", "too_many_columns",
                                                "done"});
const Function kAnalyzeDrop("AnalyzeDrop", {"entry", "unknown_table", "done"});
const Function kAnalyzeAlter("AnalyzeAlter",
                             {"entry", "unknown_table", "add", "add_duplicate", "add_limit",
                              "add_text", "drop", "drop_unknown", "drop_last", "rename",
                              "rename_exists", "done"});
const Function kHandleCall("HandleCall", {"entry", "unknown_procedure", "analyze", "bad_args",
                                          "unknown_table", "fork_failed", "worker_ok",
                                          "worker_crashed", "worker_failed"});
const Function kAnalyzeWorker("AnalyzeWorker",
                              {"entry", "storage_error", "bad_count", "compute", "report"});
const Function kAverageRowWidth("AverageRowWidth", {"entry", "divide"});
const Function kDepthLadder("DepthLadder",
                            {"entry", "d2", "d3", "d4", "d6", "d8", "d12", "d16", "d24"});
const Function kWidthLadder("WidthLadder", {"entry", "w2", "w4", "w8", "w16"});
const Function kRowsLadder("RowsLadder", {"entry", "r2", "r4", "r8", "r16"});

}  // namespace

using sql::Node;
using sql::NodeKind;

enum class ExprType { kNull, kInt, kText };

const Column* FindColumn(const std::vector<Column>& cols, std::string_view name) {
  for (const auto& c : cols)
    if (c.name == name) return &c;
  return nullptr;
}

ExprType TypeOf(ColumnType t) { return t == ColumnType::kInt ? ExprType::kInt : ExprType::kText; }

[[gnu::noinline]] void DepthLadder(int depth) {
  Frame f(kDepthLadder);
  if (depth < 2) return;
  TOY_HIT(f, "d2");
  if (depth < 3) return;
  TOY_HIT(f, "d3");
  if (depth < 4) return;
  TOY_HIT(f, "d4");
  if (depth < 6) return;
  TOY_HIT(f, "d6");
  if (depth < 8) return;
  TOY_HIT(f, "d8");
  if (depth < 12) return;
  TOY_HIT(f, "d12");
  if (depth < 16) return;
  TOY_HIT(f, "d16");
  if (depth < 24) return;
  TOY_HIT(f, "d24");
}

[[gnu::noinline]] void WidthLadder(size_t items) {
  Frame f(kWidthLadder);
  if (items < 2) return;
  TOY_HIT(f, "w2");
  if (items < 4) return;
  TOY_HIT(f, "w4");
  if (items < 8) return;
  TOY_HIT(f, "w8");
  if (items < 16) return;
  TOY_HIT(f, "w16");
}

[[gnu::noinline]] void RowsLadder(size_t rows) {
  Frame f(kRowsLadder);
  if (rows < 2) return;
  TOY_HIT(f, "r2");
  if (rows < 4) return;
  TOY_HIT(f, "r4");
  if (rows < 8) return;
  TOY_HIT(f, "r8");
  if (rows < 16) return;
  TOY_HIT(f, "r16");
}

class ExprAnalyzer {
 public:
  ExprAnalyzer(const std::vector<Column>* columns, bool allow_aggregates)
      : columns_(columns), allow_aggregates_(allow_aggregates) {}

  std::optional<ExprType> Analyze(const Node& n) { return Expr(n, 1); }

  const std::string& error() const { return error_; }
  int max_depth() const { return max_depth_; }
  bool saw_aggregate() const { return saw_aggregate_; }
  bool column_outside_aggregate() const { return column_outside_aggregate_; }
  void MarkColumnOutsideAggregate() { column_outside_aggregate_ = true; }

  [[gnu::noinline]] std::optional<ExprType> Expr(const Node& n, int depth) {
    Frame f(kAnalyzeExpr);
    max_depth_ = std::max(max_depth_, depth);
    if (n.kind == NodeKind::kLiteral) {
      if (n.tag == "int") {
        TOY_HIT(f, "int");
        if (!ParseIntLiteral(n.text)) {
          TOY_HIT(f, "int_range");
          return Fail("integer literal out of range");
        }
        return ExprType::kInt;
      }
      if (n.tag == "string") {
        TOY_HIT(f, "string");
        return ExprType::kText;
      }
      TOY_HIT(f, "null");
      return ExprType::kNull;
    }
    if (n.kind == NodeKind::kIdentifier) {
      TOY_HIT(f, "column");
      if (!columns_) {
        TOY_HIT(f, "no_table");
        return Fail("column reference " + n.text + " without FROM");
      }
      const Column* c = FindColumn(*columns_, n.text);
      if (!c) {
        TOY_HIT(f, "column_unknown");
        return Fail("unknown column " + n.text);
      }
      if (!in_aggregate_) column_outside_aggregate_ = true;
      return TypeOf(c->type);
    }
    if (n.tag == "paren") {
      TOY_HIT(f, "paren");
      return Expr(n.children[1], depth + 1);
    }
    if (n.tag == "unary") {
      auto t = Expr(n.children[1], depth + 1);
      if (!t) return t;
      if (n.children[0].text == "-") {
        TOY_HIT(f, "neg");
      } else {
        TOY_HIT(f, "not");
      }
      if (*t == ExprType::kText) {
        TOY_HIT(f, "operand_type");
        return Fail("operand of " + n.children[0].text + " must be INT");
      }
      return ExprType::kInt;
    }
    if (n.tag == "is_null") {
      TOY_HIT(f, "is_null");
      if (!Expr(n.children[0], depth + 1)) return std::nullopt;
      return ExprType::kInt;
    }
    if (n.tag == "binary") {
      auto l = Expr(n.children[0], depth + 1);
      if (!l) return l;
      auto r = Expr(n.children[2], depth + 1);
      if (!r) return r;
      const std::string& op = n.children[1].text;
      if (op == "AND" || op == "OR") {
        TOY_HIT(f, "logic");
        if (*l == ExprType::kText || *r == ExprType::kText) {
          TOY_HIT(f, "operand_type");
          return Fail("operands of " + op + " must be INT");
        }
        return ExprType::kInt;
      }
      if (op == "||") {
        TOY_HIT(f, "concat");
        return ExprType::kText;
      }
      if (op == "+" || op == "-" || op == "*" || op == "/" || op == "%") {
        TOY_HIT(f, "arith");
        if (*l == ExprType::kText || *r == ExprType::kText) {
          TOY_HIT(f, "operand_type");
          return Fail("operands of " + op + " must be INT");
        }
        return ExprType::kInt;
      }
      TOY_HIT(f, "compare");
      if (*l != ExprType::kNull && *r != ExprType::kNull && *l != *r) {
        TOY_HIT(f, "compare_mismatch");
        return Fail("cannot compare INT with TEXT");
      }
      return ExprType::kInt;
    }
    TOY_HIT(f, "call");
    return Call(n, depth);
  }

  [[gnu::noinline]] std::optional<ExprType> Call(const Node& n, int depth) {
    Frame f(kAnalyzeCall);
    const std::string name = ToLower(n.children[0].text);
    const bool star = n.children.size() == 4 && n.children[2].text == "*";
    std::vector<const Node*> args;
    if (n.children.size() == 4 && !star) args = Elements(n.children[2]);

    if (name == "count" || name == "sum" || name == "min" || name == "max") {
      TOY_HIT(f, "aggregate");
      if (!allow_aggregates_) {
        TOY_HIT(f, "aggregate_misplaced");
        return Fail("aggregate " + name + " not allowed here");
      }
      if (in_aggregate_) {
        TOY_HIT(f, "aggregate_nested");
        return Fail("nested aggregate " + name);
      }
      saw_aggregate_ = true;
      if (star) {
        TOY_HIT(f, "star");
        if (name != "count") return Fail(name + "(*) is not supported");
        return ExprType::kInt;
      }
      if (args.size() != 1) {
        TOY_HIT(f, "arity");
        return Fail(name + " takes one argument");
      }
      TOY_HIT(f, "aggregate_arg");
      in_aggregate_ = true;
      auto t = Expr(*args[0], depth + 1);
      in_aggregate_ = false;
      if (!t) return t;
      if (name == "sum" && *t == ExprType::kText) {
        TOY_HIT(f, "arg_type");
        return Fail("sum of TEXT");
      }
      return name == "count" || name == "sum" ? ExprType::kInt : *t;
    }
    if (name == "abs" || name == "length" || name == "upper" || name == "lower" ||
        name == "coalesce") {
      TOY_HIT(f, "scalar");
      if (star) {
        TOY_HIT(f, "star");
        return Fail(name + "(*) is not supported");
      }
      if (args.empty() || (name != "coalesce" && args.size() != 1)) {
        TOY_HIT(f, "arity");
        return Fail("wrong number of arguments to " + name);
      }
      std::vector<ExprType> types;
      for (const Node* a : args) {
        TOY_HIT(f, "scalar_arg");
        auto t = Expr(*a, depth + 1);
        if (!t) return t;
        types.push_back(*t);
      }
      if (name == "coalesce") {
        ExprType result = ExprType::kNull;
        for (ExprType t : types) {
          if (t == ExprType::kNull) continue;
          if (result != ExprType::kNull && result != t) {
            TOY_HIT(f, "arg_type");
            return Fail("coalesce of mixed types");
          }
          result = t;
        }
        return result;
      }
      const ExprType want = name == "abs" ? ExprType::kInt : ExprType::kText;
      if (types[0] != ExprType::kNull && types[0] != want) {
        TOY_HIT(f, "arg_type");
        return Fail("wrong argument type for " + name);
      }
      return name == "length" || name == "abs" ? ExprType::kInt : ExprType::kText;
    }
    TOY_HIT(f, "unknown");
    return Fail("unknown function " + name);
  }

 private:
  std::optional<ExprType> Fail(std::string message) {
    if (error_.empty()) error_ = std::move(message);
    return std::nullopt;
  }

  const std::vector<Column>* columns_;
  bool allow_aggregates_;
  bool in_aggregate_ = false;
  bool saw_aggregate_ = false;
  bool column_outside_aggregate_ = false;
  int max_depth_ = 0;
  std::string error_;
};

class QueryServer {
 public:
  explicit QueryServer(int storage_fd) : storage_fd_(storage_fd) {}

  [[gnu::noinline]] WireFrame HandleRequest(const std::string& sql) {
    Frame f(kHandleRequest);
    sql::Ast ast;
    try {
      ast = sql::ParseStrict(sql);
    } catch (const sql::SyntaxError& e) {
      TOY_HIT(f, "syntax_error");
      return {kErrorFrame, std::string("syntax error: ") + e.what()};
    }
    if (ast.root.children.size() != 1) {
      TOY_HIT(f, "multi_statement");
      return {kErrorFrame, "one statement per request"};
    }
    const Node& stmt = ast.root.children[0];
    std::string error;
    if (stmt.tag == "select") {
      TOY_HIT(f, "dispatch_select");
      error = AnalyzeSelect(stmt);
    } else if (stmt.tag == "insert") {
      TOY_HIT(f, "dispatch_insert");
      error = AnalyzeInsert(stmt);
    } else if (stmt.tag == "update") {
      TOY_HIT(f, "dispatch_update");
      error = AnalyzeUpdate(stmt);
    } else if (stmt.tag == "delete") {
      TOY_HIT(f, "dispatch_delete");
      error = AnalyzeDelete(stmt);
    } else if (stmt.tag == "create_table") {
      TOY_HIT(f, "dispatch_create");
      error = AnalyzeCreate(stmt);
    } else if (stmt.tag == "drop_table") {
      TOY_HIT(f, "dispatch_drop");
      error = AnalyzeDrop(stmt);
    } else if (stmt.tag == "alter_table") {
      TOY_HIT(f, "dispatch_alter");
      error = AnalyzeAlter(stmt);
    } else {
      TOY_HIT(f, "dispatch_call");
      return HandleCall(stmt);
    }
    if (!error.empty()) {
      TOY_HIT(f, "analysis_error");
      return {kErrorFrame, error};
    }
    TOY_HIT(f, "forward");
    std::optional<WireFrame> reply = ToStorage(sql);
    if (!reply) {
      TOY_HIT(f, "storage_lost");
      return {kErrorFrame, "storage worker lost"};
    }
    if (reply->type != kRowsFrame) {
      TOY_HIT(f, "storage_error");
      return *reply;
    }
    TOY_HIT(f, "storage_rows");
    if (stmt.tag == "create_table" || stmt.tag == "drop_table" || stmt.tag == "alter_table") {
      TOY_HIT(f, "catalog_update");
      ApplyDdl(stmt);
    }
    return *reply;
  }

  [[gnu::noinline]] std::string AnalyzeSelect(const Node& s) {
    Frame f(kAnalyzeSelect);
    const Node* list = FindChild(s, "select_list");
    const auto items = Elements(*list);
    const Node* order = FindChild(s, "order_by");
    std::vector<const Node*> order_exprs;
    // Positional references are resolved before anything else.
    if (order) {
      for (const Node* item : Elements(order->children[2])) {
        TOY_HIT(f, "order_item");
        const Node& e = item->children[0];
        if (e.kind != NodeKind::kLiteral || e.tag != "int") {
          order_exprs.push_back(&e);
          continue;
        }
        TOY_HIT(f, "order_positional");
        auto k = ParseIntLiteral(e.text);
        if (!k || *k < 1 || *k > static_cast<int64_t>(items.size()) + 1) {
          TOY_HIT(f, "order_range_error");
          return "ORDER BY position " + e.text + " is out of range";
        }
        TOY_HIT(f, "order_resolve");
        TOY_ASSERT(*k <= static_cast<int64_t>(items.size()));
      }
    }
    const std::vector<Column>* cols = nullptr;
    if (const Node* from = FindChild(s, "from")) {
      TOY_HIT(f, "from");
      auto it = tables_.find(from->children[1].text);
      if (it == tables_.end()) {
        TOY_HIT(f, "unknown_table");
        return "unknown table " + from->children[1].text;
      }
      cols = &it->second;
    } else {
      TOY_HIT(f, "no_from");
    }
    ExprAnalyzer a(cols, true);
    for (const Node* item : items) {
      if (item->kind == NodeKind::kKeyword) {
        TOY_HIT(f, "star");
        if (!cols) {
          TOY_HIT(f, "star_without_from");
          return "SELECT * without FROM";
        }
        a.MarkColumnOutsideAggregate();
        continue;
      }
      TOY_HIT(f, "item");
      if (!a.Analyze(*item)) {
        TOY_HIT(f, "item_error");
        return a.error();
      }
    }
    if (a.saw_aggregate() && a.column_outside_aggregate()) {
      TOY_HIT(f, "mixed_aggregate");
      return "cannot mix aggregates with plain columns";
    }
    int depth = a.max_depth();
    if (const Node* where = FindChild(s, "where")) {
      TOY_HIT(f, "where");
      ExprAnalyzer w(cols, false);
      if (!w.Analyze(where->children[1])) {
        TOY_HIT(f, "where_error");
        return w.error();
      }
      depth = std::max(depth, w.max_depth());
    }
    for (const Node* e : order_exprs) {
      TOY_HIT(f, "order_expr");
      ExprAnalyzer o(cols, false);
      if (!o.Analyze(*e)) {
        TOY_HIT(f, "order_error");
        return o.error();
      }
      depth = std::max(depth, o.max_depth());
    }
    if (const Node* limit = FindChild(s, "limit")) {
      TOY_HIT(f, "limit");
      if (!ParseIntLiteral(limit->children[1].text)) {
        TOY_HIT(f, "limit_error");
        return "LIMIT out of range";
      }
    }
    TOY_HIT(f, "done");
    DepthLadder(depth);
    WidthLadder(items.size());
    return "";
  }

  [[gnu::noinline]] std::string AnalyzeInsert(const Node& s) {
    Frame f(kAnalyzeInsert);
    const std::string& table = s.children[2].text;
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      TOY_HIT(f, "unknown_table");
      return "unknown table " + table;
    }
    const auto& cols = it->second;
    std::vector<const Column*> targets;
    if (const Node* list = FindChild(s, "column_list")) {
      TOY_HIT(f, "column_list");
      for (const Node* name : Elements(list->children[1])) {
        const Column* c = FindColumn(cols, name->text);
        if (!c) {
          TOY_HIT(f, "unknown_column");
          return "unknown column " + name->text;
        }
        if (std::find(targets.begin(), targets.end(), c) != targets.end()) {
          TOY_HIT(f, "duplicate_column");
          return "column " + name->text + " listed twice";
        }
        targets.push_back(c);
      }
    } else {
      for (const auto& c : cols) targets.push_back(&c);
    }
    const Node* values = FindChild(s, "values");
    const auto rows = Elements(values->children[1]);
    int depth = 0;
    for (const Node* row : rows) {
      TOY_HIT(f, "row");
      const auto exprs = Elements(row->children[1]);
      if (exprs.size() != targets.size()) {
        TOY_HIT(f, "arity_error");
        return "row has " + std::to_string(exprs.size()) + " values for " +
               std::to_string(targets.size()) + " columns";
      }
      for (size_t i = 0; i < exprs.size(); ++i) {
        TOY_HIT(f, "value");
        ExprAnalyzer a(nullptr, false);
        auto t = a.Analyze(*exprs[i]);
        if (!t) {
          TOY_HIT(f, "value_error");
          return a.error();
        }
        depth = std::max(depth, a.max_depth());
        if (*t != ExprType::kNull && *t != TypeOf(targets[i]->type)) {
          TOY_HIT(f, "type_error");
          return "type mismatch for column " + targets[i]->name;
        }
      }
    }
    TOY_HIT(f, "done");
    DepthLadder(depth);
    RowsLadder(rows.size());
    return "";
  }

  [[gnu::noinline]] std::string AnalyzeUpdate(const Node& s) {
    Frame f(kAnalyzeUpdate);
    const std::string& table = s.children[1].text;
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      TOY_HIT(f, "unknown_table");
      return "unknown table " + table;
    }
    const auto& cols = it->second;
    int depth = 0;
    for (const Node* assign : Elements(FindChild(s, "set")->children[1])) {
      TOY_HIT(f, "assign");
      const Column* c = FindColumn(cols, assign->children[0].text);
      if (!c) {
        TOY_HIT(f, "unknown_column");
        return "unknown column " + assign->children[0].text;
      }
      ExprAnalyzer a(&cols, false);
      auto t = a.Analyze(assign->children[2]);
      if (!t) {
        TOY_HIT(f, "assign_error");
        return a.error();
      }
      depth = std::max(depth, a.max_depth());
      if (*t != ExprType::kNull && *t != TypeOf(c->type)) {
        TOY_HIT(f, "type_error");
        return "type mismatch for column " + c->name;
      }
    }
    if (const Node* where = FindChild(s, "where")) {
      TOY_HIT(f, "where");
      ExprAnalyzer w(&cols, false);
      if (!w.Analyze(where->children[1])) {
        TOY_HIT(f, "where_error");
        return w.error();
      }
      depth = std::max(depth, w.max_depth());
    }
    TOY_HIT(f, "done");
    DepthLadder(depth);
    return "";
  }

  [[gnu::noinline]] std::string AnalyzeDelete(const Node& s) {
    Frame f(kAnalyzeDelete);
    const std::string& table = s.children[2].text;
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      TOY_HIT(f, "unknown_table");
      return "unknown table " + table;
    }
    if (const Node* where = FindChild(s, "where")) {
      TOY_HIT(f, "where");
      ExprAnalyzer w(&it->second, false);
      if (!w.Analyze(where->children[1])) {
        TOY_HIT(f, "where_error");
        return w.error();
      }
    }
    TOY_HIT(f, "done");
    return "";
  }

  [[gnu::noinline]] std::string AnalyzeCreate(const Node& s) {
    Frame f(kAnalyzeCreate);
    const std::string& table = s.children[2].text;
    if (tables_.count(table)) {
      TOY_HIT(f, "exists");
      return "table " + table + " already exists";
    }
    if (tables_.size() >= kMaxTables) {
      TOY_HIT(f, "too_many_tables");
      return "too many tables";
    }
    std::vector<std::string> seen;
    const auto defs = Elements(*FindChild(s, "coldef_list"));
    for (const Node* def : defs) {
      TOY_HIT(f, "column");
      if (std::find(seen.begin(), seen.end(), def->children[0].text) != seen.end()) {
        TOY_HIT(f, "duplicate_column");
        return "duplicate column " + def->children[0].text;
      }
      seen.push_back(def->children[0].text);
    }
    if (defs.size() > kMaxColumns) {
      TOY_HIT(f, "too_many_columns");
      return "too many columns";
    }
    TOY_HIT(f, "done");
    return "";
  }

  [[gnu::noinline]] std::string AnalyzeDrop(const Node& s) {
    Frame f(kAnalyzeDrop);
    if (!tables_.count(s.children[2].text)) {
      TOY_HIT(f, "unknown_table");
      return "unknown table " + s.children[2].text;
    }
    TOY_HIT(f, "done");
    return "";
  }

  [[gnu::noinline]] std::string AnalyzeAlter(const Node& s) {
    Frame f(kAnalyzeAlter);
    const std::string& table = s.children[2].text;
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      TOY_HIT(f, "unknown_table");
      return "unknown table " + table;
    }
    const auto& cols = it->second;
    const Node& action = s.children[3];
    const Node& last = action.children.back();
    if (action.tag == "add_column") {
      TOY_HIT(f, "add");
      if (FindColumn(cols, last.children[0].text)) {
        TOY_HIT(f, "add_duplicate");
        return "column " + last.children[0].text + " already exists";
      }
      if (cols.size() >= kMaxColumns) {
        TOY_HIT(f, "add_limit");
        return "too many columns";
      }
      if (last.children[1].text == "TEXT") TOY_HIT(f, "add_text");
    } else if (action.tag == "drop_column") {
      TOY_HIT(f, "drop");
      if (!FindColumn(cols, last.text)) {
        TOY_HIT(f, "drop_unknown");
        return "unknown column " + last.text;
      }
      if (cols.size() == 1) {
        TOY_HIT(f, "drop_last");
        return "cannot drop the only column";
      }
    } else {
      TOY_HIT(f, "rename");
      if (tables_.count(last.text)) {
        TOY_HIT(f, "rename_exists");
        return "table " + last.text + " already exists";
      }
    }
    TOY_HIT(f, "done");
    return "";
  }

  void ApplyDdl(const Node& s) {
    if (s.tag == "create_table") {
      std::vector<Column> cols;
      for (const Node* def : Elements(*FindChild(s, "coldef_list")))
        cols.push_back({def->children[0].text, *ParseColumnType(def->children[1].text)});
      tables_[s.children[2].text] = std::move(cols);
    } else if (s.tag == "drop_table") {
      tables_.erase(s.children[2].text);
    } else {
      auto& cols = tables_[s.children[2].text];
      const Node& action = s.children[3];
      const Node& last = action.children.back();
      if (action.tag == "add_column") {
        cols.push_back({last.children[0].text, *ParseColumnType(last.children[1].text)});
      } else if (action.tag == "drop_column") {
        cols.erase(std::remove_if(cols.begin(), cols.end(),
                                  [&](const Column& c) { return c.name == last.text; }),
                   cols.end());
      } else {
        auto node = tables_.extract(s.children[2].text);
        node.key() = last.text;
        tables_.insert(std::move(node));
      }
    }
  }

  [[gnu::noinline]] WireFrame HandleCall(const Node& s) {
    Frame f(kHandleCall);
    const std::string name = ToLower(s.children[1].text);
    if (name != "analyze") {
      TOY_HIT(f, "unknown_procedure");
      return {kErrorFrame, "unknown procedure " + name};
    }
    TOY_HIT(f, "analyze");
    const Node* args = s.children.size() == 5 ? &s.children[3] : nullptr;
    if (!args || args->children.size() != 1 || args->children[0].kind != NodeKind::kIdentifier) {
      TOY_HIT(f, "bad_args");
      return {kErrorFrame, "analyze takes one table name"};
    }
    const std::string& table = args->children[0].text;
    auto it = tables_.find(table);
    if (it == tables_.end()) {
      TOY_HIT(f, "unknown_table");
      return {kErrorFrame, "unknown table " + table};
    }
    int pipe_fds[2];
    if (pipe2(pipe_fds, O_CLOEXEC) != 0) {
      TOY_HIT(f, "fork_failed");
      return {kErrorFrame, "analyze: cannot create pipe"};
    }
    pid_t child = fork();
    if (child < 0) {
      TOY_HIT(f, "fork_failed");
      close(pipe_fds[0]);
      close(pipe_fds[1]);
      return {kErrorFrame, "analyze: fork failed"};
    }
    if (child == 0) {
      close(pipe_fds[0]);
      _exit(AnalyzeWorker(table, it->second.size(), pipe_fds[1]));
    }
    close(pipe_fds[1]);
    std::string result;
    char buf[512];
    ssize_t n;
    while ((n = read(pipe_fds[0], buf, sizeof(buf))) > 0) result.append(buf, static_cast<size_t>(n));
    close(pipe_fds[0]);
    int status = 0;
    waitpid(child, &status, 0);
    if (WIFSIGNALED(status)) {
      TOY_HIT(f, "worker_crashed");
      return {kErrorFrame, "analyze worker terminated by signal " +
                               std::to_string(WTERMSIG(status))};
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      TOY_HIT(f, "worker_failed");
      return {kErrorFrame, "analyze failed: " + result};
    }
    TOY_HIT(f, "worker_ok");
    return {kRowsFrame, result};
  }

  // Runs in the forked child.
  [[gnu::noinline]] int AnalyzeWorker(const std::string& table, size_t columns, int out_fd) {
    Frame f(kAnalyzeWorker);
    auto reply = ToStorage("SELECT count(*) FROM " + table);
    auto report = [&](const std::string& text) {
      ssize_t ignored = write(out_fd, text.data(), text.size());
      (void)ignored;
    };
    if (!reply || reply->type != kRowsFrame) {
      TOY_HIT(f, "storage_error");
      report(reply ? reply->payload : "storage worker lost");
      return 2;
    }
    auto rows = ParseIntLiteral(Trim(reply->payload));
    if (!rows) {
      TOY_HIT(f, "bad_count");
      report("unexpected count reply");
      return 2;
    }
    TOY_HIT(f, "compute");
    int64_t width = AverageRowWidth(static_cast<int64_t>(columns) * 8 * *rows, *rows);
    TOY_HIT(f, "report");
    report(table + "," + std::to_string(*rows) + "," + std::to_string(width) + "\n");
    return 0;
  }

  [[gnu::noinline]] static int64_t AverageRowWidth(int64_t total_bytes, int64_t rows) {
    Frame f(kAverageRowWidth);
    volatile int64_t dividend = total_bytes;
    volatile int64_t divisor = rows;
    TOY_HIT(f, "divide");
    return dividend / divisor;
  }

 private:
  std::optional<WireFrame> ToStorage(const std::string& sql) {
    if (storage_fd_ < 0) return std::nullopt;
    try {
      WriteFrame(storage_fd_, kPlanFrame, sql);
      auto reply = ReadFrame(storage_fd_);
      if (reply) return reply;
    } catch (const WireError&) {
    }
    close(storage_fd_);
    storage_fd_ = -1;
    return std::nullopt;
  }

  int storage_fd_;
  std::map<std::string, std::vector<Column>> tables_;
};

}  // namespace sqlcov::toydb

int main(int argc, char** argv) {
  using namespace sqlcov::toydb;
  return ServerMain(argc, argv, "query", kQueryManifest, true, [](const ServerOptions& o) {
    int listen_fd = ListenUnix(o.listen_path);
    QueryServer server(ConnectUnixRetry(o.upstream_path, std::chrono::seconds(10)));
    ServeForever(listen_fd, [&](const WireFrame& request) -> WireFrame {
      if (request.type != kQueryFrame) return {kErrorFrame, "expected a query frame"};
      return server.HandleRequest(request.payload);
    });
    return 0;
  });
}
