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

// Storage worker of the toy database. Holds every table in memory and
// executes the statements planned by the query server.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crash.h"
#include "instrument.h"
#include "manifests.h"
#include "server.h"
#include "sqlcov/common/error.h"
#include "sqlcov/common/strings.h"
#include "sqlcov/sql/parser.h"
#include "tree.h"
#include "value.h"

namespace sqlcov::toydb {

namespace {

const Function kHandlePlan("HandlePlan",
                           {"entry", "parse_error", "select", "insert", "update", "delete",
                            "create", "drop", "alter", "unsupported", "exec_error", "done"});
const Function kEval("Eval",
                     {"entry", "int", "string", "null", "column", "column_missing", "paren",
                      "neg", "neg_overflow", "not", "is_null", "and", "or", "null_operand",
                      "concat", "concat_limit", "compare", "compare_type", "add", "sub", "mul",
                      "div", "mod", "div_zero", "div_overflow", "overflow", "arith_type",
                      "call"});
const Function kEvalCall("EvalCall",
                         {"entry", "aggregate", "no_group", "count_star", "count", "sum",
                          "sum_overflow", "min", "max", "agg_row", "abs", "abs_overflow",
                          "length", "upper", "lower", "coalesce", "coalesce_arg", "type_error",
                          "unknown"});
const Function kExecSelect("ExecSelect",
                           {"entry", "from", "unknown_table", "virtual_row", "where_row",
                            "row_match", "aggregate", "project", "star", "item",
                            "order", "order_positional", "order_range", "order_expr",
                            "sort", "desc", "limit", "limit_cut", "done"});
const Function kExecInsert("ExecInsert",
                           {"entry", "unknown_table", "column_list", "unknown_column", "row",
                            "arity", "value", "type_error", "text_limit", "row_limit",
                            "index_rebuild", "append", "done"});
const Function kExecUpdate("ExecUpdate",
                           {"entry", "unknown_table", "indexed", "row", "row_match", "assign",
                            "type_error", "text_limit", "empty", "done"});
const Function kExecDelete("ExecDelete", {"entry", "unknown_table", "row", "row_match",
                                          "reindex", "done"});
const Function kExecCreate("ExecCreate",
                           {"entry", "exists", "table_limit", "column", "duplicate", "done"});
const Function kExecDrop("ExecDrop", {"entry", "unknown_table", "done"});
const Function kExecAlter("ExecAlter",
                          {"entry", "unknown_table", "add", "add_exists", "add_limit",
                           "backfill", "drop", "drop_unknown", "drop_last", "rename",
                           "rename_exists", "rename_reset", "done"});
const Function kBackfillColumn("BackfillColumn", {"entry", "row", "int", "text"});
const Function kTableSizeLadder("TableSizeLadder", {"entry", "n1", "n2", "n4", "n8", "n16",
                                                    "n32", "n64", "n128", "n256"});

}  // namespace

using sql::Node;
using sql::NodeKind;

class ExecError : public Error {
 public:
  using Error::Error;
};

struct RowIndex {
  std::vector<size_t> positions;
};

struct Table {
  std::vector<Column> columns;
  std::vector<Row> rows;
  std::unique_ptr<RowIndex> index;

  std::optional<size_t> ColumnIndex(std::string_view name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == name) return i;
    return std::nullopt;
  }
  void RebuildIndex() {
    index = std::make_unique<RowIndex>();
    for (size_t i = 0; i < rows.size(); ++i) index->positions.push_back(i);
  }
};

bool IsAggregateName(std::string_view name) {
  return name == "count" || name == "sum" || name == "min" || name == "max";
}

bool ContainsAggregate(const Node& n) {
  if (n.tag == "call" && IsAggregateName(ToLower(n.children[0].text))) return true;
  for (const auto& c : n.children)
    if (ContainsAggregate(c)) return true;
  return false;
}

bool Truthy(const Value& v) {
  const auto* n = std::get_if<int64_t>(&v);
  return n && *n != 0;
}

[[gnu::noinline]] void TableSizeLadder(size_t rows) {
  Frame f(kTableSizeLadder);
  if (rows < 1) return;
  TOY_HIT(f, "n1");
  if (rows < 2) return;
  TOY_HIT(f, "n2");
  if (rows < 4) return;
  TOY_HIT(f, "n4");
  if (rows < 8) return;
  TOY_HIT(f, "n8");
  if (rows < 16) return;
  TOY_HIT(f, "n16");
  if (rows < 32) return;
  TOY_HIT(f, "n32");
  if (rows < 64) return;
  TOY_HIT(f, "n64");
  if (rows < 128) return;
  TOY_HIT(f, "n128");
  if (rows < 256) return;
  TOY_HIT(f, "n256");
}

// Evaluates expressions against one row, or against a group of rows when
// aggregates are involved.
class Evaluator {
 public:
  Evaluator(const Table* table, const Row* row, const std::vector<const Row*>* group)
      : table_(table), row_(row), group_(group) {}

  [[gnu::noinline]] Value Eval(const Node& n) {
    Frame f(kEval);
    if (n.kind == NodeKind::kLiteral) {
      if (n.tag == "int") {
        TOY_HIT(f, "int");
        auto v = ParseIntLiteral(n.text);
        if (!v) throw ExecError("integer literal out of range");
        return *v;
      }
      if (n.tag == "string") {
        TOY_HIT(f, "string");
        return UnquoteString(n.text);
      }
      TOY_HIT(f, "null");
      return Value{};
    }
    if (n.kind == NodeKind::kIdentifier) {
      TOY_HIT(f, "column");
      std::optional<size_t> i = table_ ? table_->ColumnIndex(n.text) : std::nullopt;
      if (!i || !row_) {
        TOY_HIT(f, "column_missing");
        throw ExecError("no such column " + n.text);
      }
      return (*row_)[*i];
    }
    if (n.tag == "paren") {
      TOY_HIT(f, "paren");
      return Eval(n.children[1]);
    }
    if (n.tag == "unary") {
      Value v = Eval(n.children[1]);
      if (n.children[0].text == "-") {
        TOY_HIT(f, "neg");
        if (IsNull(v)) return v;
        int64_t x = AsInt(v, f);
        if (x == std::numeric_limits<int64_t>::min()) {
          TOY_HIT(f, "neg_overflow");
          throw ExecError("integer overflow");
        }
        return -x;
      }
      TOY_HIT(f, "not");
      if (IsNull(v)) return v;
      return int64_t{AsInt(v, f) == 0};
    }
    if (n.tag == "is_null") {
      TOY_HIT(f, "is_null");
      bool negated = n.children.size() == 4;
      return int64_t{IsNull(Eval(n.children[0])) != negated};
    }
    if (n.tag == "call") {
      TOY_HIT(f, "call");
      return Call(n);
    }
    const std::string& op = n.children[1].text;
    Value l = Eval(n.children[0]);
    Value r = Eval(n.children[2]);
    if (op == "AND") {
      TOY_HIT(f, "and");
      if ((!IsNull(l) && !Truthy(l)) || (!IsNull(r) && !Truthy(r))) return int64_t{0};
      if (IsNull(l) || IsNull(r)) return Value{};
      return int64_t{1};
    }
    if (op == "OR") {
      TOY_HIT(f, "or");
      if (Truthy(l) || Truthy(r)) return int64_t{1};
      if (IsNull(l) || IsNull(r)) return Value{};
      return int64_t{0};
    }
    if (IsNull(l) || IsNull(r)) {
      TOY_HIT(f, "null_operand");
      return Value{};
    }
    if (op == "||") {
      TOY_HIT(f, "concat");
      std::string s = ToText(l) + ToText(r);
      if (s.size() > kMaxTextLength) {
        TOY_HIT(f, "concat_limit");
        throw ExecError("string too long");
      }
      return s;
    }
    if (op == "=" || op == "<>" || op == "!=" || op == "<" || op == ">" || op == "<=" ||
        op == ">=") {
      TOY_HIT(f, "compare");
      if (l.index() != r.index()) {
        TOY_HIT(f, "compare_type");
        throw ExecError("cannot compare INT with TEXT");
      }
      int c = CompareValues(l, r);
      bool result = op == "=" ? c == 0 : op == "<" ? c < 0 : op == ">" ? c > 0
                  : op == "<=" ? c <= 0 : op == ">=" ? c >= 0 : c != 0;
      return int64_t{result};
    }
    int64_t a = AsInt(l, f), b = AsInt(r, f), out = 0;
    bool overflow = false;
    if (op == "+") {
      TOY_HIT(f, "add");
      overflow = __builtin_add_overflow(a, b, &out);
    } else if (op == "-") {
      TOY_HIT(f, "sub");
      overflow = __builtin_sub_overflow(a, b, &out);
    } else if (op == "*") {
      TOY_HIT(f, "mul");
      overflow = __builtin_mul_overflow(a, b, &out);
    } else {
      if (op == "/") TOY_HIT(f, "div");
      else TOY_HIT(f, "mod");
      if (b == 0) {
        TOY_HIT(f, "div_zero");
        throw ExecError("division by zero");
      }
      if (a == std::numeric_limits<int64_t>::min() && b == -1) {
        TOY_HIT(f, "div_overflow");
        throw ExecError("integer overflow");
      }
      out = op == "/" ? a / b : a % b;
    }
    if (overflow) {
      TOY_HIT(f, "overflow");
      throw ExecError("integer overflow");
    }
    return out;
  }

  [[gnu::noinline]] Value Call(const Node& n) {
    Frame f(kEvalCall);
    const std::string name = ToLower(n.children[0].text);
    const bool star = n.children.size() == 4 && n.children[2].text == "*";
    std::vector<const Node*> args;
    if (n.children.size() == 4 && !star) args = Elements(n.children[2]);
    if (IsAggregateName(name)) {
      TOY_HIT(f, "aggregate");
      if (!group_) {
        TOY_HIT(f, "no_group");
        throw ExecError("aggregate " + name + " not allowed here");
      }
      if (star) {
        TOY_HIT(f, "count_star");
        return static_cast<int64_t>(group_->size());
      }
      if (args.size() != 1) throw ExecError(name + " takes one argument");
      int64_t count = 0;
      Value acc;
      for (const Row* row : *group_) {
        TOY_HIT(f, "agg_row");
        Evaluator inner(table_, row, nullptr);
        Value v = inner.Eval(*args[0]);
        if (IsNull(v)) continue;
        ++count;
        if (name == "sum") {
          int64_t x = inner.AsInt(v, f);
          int64_t sum = IsNull(acc) ? 0 : std::get<int64_t>(acc);
          if (__builtin_add_overflow(sum, x, &sum)) {
            TOY_HIT(f, "sum_overflow");
            throw ExecError("integer overflow");
          }
          acc = sum;
        } else if (name != "count") {
          if (!IsNull(acc) && acc.index() != v.index()) throw ExecError("mixed types");
          int c = IsNull(acc) ? 0 : CompareValues(v, acc);
          if (IsNull(acc) || (name == "min" ? c < 0 : c > 0)) acc = v;
        }
      }
      if (name == "count") {
        TOY_HIT(f, "count");
        return count;
      }
      if (name == "sum") TOY_HIT(f, "sum");
      else if (name == "min") TOY_HIT(f, "min");
      else TOY_HIT(f, "max");
      return acc;
    }
    std::vector<Value> values;
    for (const Node* a : args) values.push_back(Eval(*a));
    if (name == "coalesce") {
      TOY_HIT(f, "coalesce");
      for (Value& v : values) {
        TOY_HIT(f, "coalesce_arg");
        if (!IsNull(v)) return v;
      }
      return Value{};
    }
    if (values.size() != 1 || !(name == "abs" || name == "length" || name == "upper" ||
                                name == "lower")) {
      TOY_HIT(f, "unknown");
      throw ExecError("unknown function " + name);
    }
    const Value& v = values[0];
    if (IsNull(v)) return v;
    if (name == "abs") {
      TOY_HIT(f, "abs");
      int64_t x = AsInt(v, f);
      if (x == std::numeric_limits<int64_t>::min()) {
        TOY_HIT(f, "abs_overflow");
        throw ExecError("integer overflow");
      }
      return x < 0 ? -x : x;
    }
    const auto* s = std::get_if<std::string>(&v);
    if (!s) {
      TOY_HIT(f, "type_error");
      throw ExecError(name + " expects TEXT");
    }
    if (name == "length") {
      TOY_HIT(f, "length");
      return static_cast<int64_t>(s->size());
    }
    if (name == "upper") {
      TOY_HIT(f, "upper");
      return ToUpper(*s);
    }
    TOY_HIT(f, "lower");
    return ToLower(*s);
  }

  int64_t AsInt(const Value& v, Frame& f) {
    if (const auto* n = std::get_if<int64_t>(&v)) return *n;
    if (&f.fn() == &kEval) TOY_HIT(f, "arith_type");
    else TOY_HIT(f, "type_error");
    throw ExecError("expected an INT operand");
  }

 private:
  static std::string ToText(const Value& v) {
    if (const auto* n = std::get_if<int64_t>(&v)) return std::to_string(*n);
    return std::get<std::string>(v);
  }

  const Table* table_;
  const Row* row_;
  const std::vector<const Row*>* group_;
};

void CheckType(const Column& c, const Value& v) {
  if (IsNull(v)) return;
  bool is_int = std::holds_alternative<int64_t>(v);
  if (is_int != (c.type == ColumnType::kInt))
    throw ExecError("type mismatch for column " + c.name);
}

class StorageEngine {
 public:
  [[gnu::noinline]] WireFrame HandlePlan(const std::string& sql) {
    Frame f(kHandlePlan);
    sql::Ast ast;
    try {
      ast = sql::ParseStrict(sql);
    } catch (const sql::SyntaxError& e) {
      TOY_HIT(f, "parse_error");
      return {kErrorFrame, std::string("plan rejected: ") + e.what()};
    }
    if (ast.root.children.size() != 1) {
      TOY_HIT(f, "parse_error");
      return {kErrorFrame, "plan must hold one statement"};
    }
    const Node& stmt = ast.root.children[0];
    std::string out;
    try {
      if (stmt.tag == "select") {
        TOY_HIT(f, "select");
        out = ExecSelect(stmt);
      } else if (stmt.tag == "insert") {
        TOY_HIT(f, "insert");
        out = ExecInsert(stmt);
      } else if (stmt.tag == "update") {
        TOY_HIT(f, "update");
        out = ExecUpdate(stmt);
      } else if (stmt.tag == "delete") {
        TOY_HIT(f, "delete");
        out = ExecDelete(stmt);
      } else if (stmt.tag == "create_table") {
        TOY_HIT(f, "create");
        out = ExecCreate(stmt);
      } else if (stmt.tag == "drop_table") {
        TOY_HIT(f, "drop");
        out = ExecDrop(stmt);
      } else if (stmt.tag == "alter_table") {
        TOY_HIT(f, "alter");
        out = ExecAlter(stmt);
      } else {
        TOY_HIT(f, "unsupported");
        throw ExecError("statement not supported by storage");
      }
    } catch (const ExecError& e) {
      TOY_HIT(f, "exec_error");
      return {kErrorFrame, e.what()};
    }
    TOY_HIT(f, "done");
    return {kRowsFrame, out};
  }

  [[gnu::noinline]] std::string ExecSelect(const Node& s) {
    Frame f(kExecSelect);
    const Table* table = nullptr;
    std::vector<const Row*> source;
    Row empty_row;
    if (const Node* from = FindChild(s, "from")) {
      TOY_HIT(f, "from");
      table = Lookup(from->children[1].text);
      if (!table) {
        TOY_HIT(f, "unknown_table");
        throw ExecError("unknown table " + from->children[1].text);
      }
      for (const Row& r : table->rows) source.push_back(&r);
    } else {
      TOY_HIT(f, "virtual_row");
      source.push_back(&empty_row);
    }
    std::vector<const Row*> matched;
    const Node* where = FindChild(s, "where");
    for (const Row* r : source) {
      if (where) {
        TOY_HIT(f, "where_row");
        if (!Truthy(Evaluator(table, r, nullptr).Eval(where->children[1]))) continue;
      }
      TOY_HIT(f, "row_match");
      matched.push_back(r);
    }
    const auto items = Elements(*FindChild(s, "select_list"));
    bool aggregate = std::any_of(items.begin(), items.end(),
                                 [](const Node* n) { return ContainsAggregate(*n); });
    // Each output row keeps the source row it came from for ORDER BY.
    std::vector<std::pair<Row, const Row*>> out;
    if (aggregate) {
      TOY_HIT(f, "aggregate");
      Row row;
      Evaluator e(table, nullptr, &matched);
      for (const Node* item : items) row.push_back(e.Eval(*item));
      out.emplace_back(std::move(row), nullptr);
    } else {
      for (const Row* r : matched) {
        TOY_HIT(f, "project");
        Row row;
        Evaluator e(table, r, nullptr);
        for (const Node* item : items) {
          if (item->kind == NodeKind::kKeyword) {
            TOY_HIT(f, "star");
            if (table) row.insert(row.end(), r->begin(), r->end());
            continue;
          }
          TOY_HIT(f, "item");
          row.push_back(e.Eval(*item));
        }
        out.emplace_back(std::move(row), r);
      }
    }
    if (const Node* order = FindChild(s, "order_by")) {
      TOY_HIT(f, "order");
      struct Key {
        std::vector<Value> values;
      };
      const auto order_items = Elements(order->children[2]);
      std::vector<bool> desc;
      std::vector<Key> keys(out.size());
      for (const Node* item : order_items) {
        desc.push_back(item->children.size() == 2 && item->children[1].text == "DESC");
        const Node& e = item->children[0];
        const bool positional = e.kind == NodeKind::kLiteral && e.tag == "int";
        for (size_t i = 0; i < out.size(); ++i) {
          if (positional) {
            TOY_HIT(f, "order_positional");
            auto k = ParseIntLiteral(e.text);
            if (!k || *k < 1 || static_cast<size_t>(*k) > out[i].first.size()) {
              TOY_HIT(f, "order_range");
              throw ExecError("ORDER BY position " + e.text + " is out of range");
            }
            keys[i].values.push_back(out[i].first[static_cast<size_t>(*k - 1)]);
          } else {
            TOY_HIT(f, "order_expr");
            keys[i].values.push_back(Evaluator(table, out[i].second, nullptr).Eval(e));
          }
        }
      }
      std::vector<size_t> perm(out.size());
      for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      TOY_HIT(f, "sort");
      if (std::find(desc.begin(), desc.end(), true) != desc.end()) TOY_HIT(f, "desc");
      std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
        for (size_t k = 0; k < desc.size(); ++k) {
          int c = CompareValues(keys[a].values[k], keys[b].values[k]);
          if (c != 0) return desc[k] ? c > 0 : c < 0;
        }
        return false;
      });
      std::vector<std::pair<Row, const Row*>> sorted;
      for (size_t i : perm) sorted.push_back(std::move(out[i]));
      out = std::move(sorted);
    }
    if (const Node* limit = FindChild(s, "limit")) {
      TOY_HIT(f, "limit");
      auto n = ParseIntLiteral(limit->children[1].text);
      if (!n) throw ExecError("LIMIT out of range");
      if (static_cast<uint64_t>(*n) < out.size()) {
        TOY_HIT(f, "limit_cut");
        out.resize(static_cast<size_t>(*n));
      }
    }
    TOY_HIT(f, "done");
    std::vector<Row> rows;
    for (auto& [row, src] : out) rows.push_back(std::move(row));
    return FormatRows(rows);
  }

  [[gnu::noinline]] std::string ExecInsert(const Node& s) {
    Frame f(kExecInsert);
    Table* table = Lookup(s.children[2].text);
    if (!table) {
      TOY_HIT(f, "unknown_table");
      throw ExecError("unknown table " + s.children[2].text);
    }
    std::vector<size_t> targets;
    if (const Node* list = FindChild(s, "column_list")) {
      TOY_HIT(f, "column_list");
      for (const Node* name : Elements(list->children[1])) {
        auto i = table->ColumnIndex(name->text);
        if (!i) {
          TOY_HIT(f, "unknown_column");
          throw ExecError("unknown column " + name->text);
        }
        targets.push_back(*i);
      }
    } else {
      for (size_t i = 0; i < table->columns.size(); ++i) targets.push_back(i);
    }
    std::vector<Row> fresh;
    for (const Node* row : Elements(FindChild(s, "values")->children[1])) {
      TOY_HIT(f, "row");
      const auto exprs = Elements(row->children[1]);
      if (exprs.size() != targets.size()) {
        TOY_HIT(f, "arity");
        throw ExecError("wrong number of values");
      }
      Row r(table->columns.size());
      for (size_t i = 0; i < exprs.size(); ++i) {
        TOY_HIT(f, "value");
        Value v = Evaluator(nullptr, nullptr, nullptr).Eval(*exprs[i]);
        const Column& c = table->columns[targets[i]];
        if (!IsNull(v) && std::holds_alternative<int64_t>(v) != (c.type == ColumnType::kInt)) {
          TOY_HIT(f, "type_error");
          throw ExecError("type mismatch for column " + c.name);
        }
        if (const auto* text = std::get_if<std::string>(&v); text && text->size() > kMaxTextLength) {
          TOY_HIT(f, "text_limit");
          throw ExecError("string too long");
        }
        r[targets[i]] = std::move(v);
      }
      fresh.push_back(std::move(r));
    }
    if (table->rows.size() + fresh.size() > kMaxRows) {
      TOY_HIT(f, "row_limit");
      throw ExecError("table is full");
    }
    if (!table->index) {
      TOY_HIT(f, "index_rebuild");
      table->RebuildIndex();
    }
    for (Row& r : fresh) {
      TOY_HIT(f, "append");
      table->index->positions.push_back(table->rows.size());
      table->rows.push_back(std::move(r));
    }
    TOY_HIT(f, "done");
    TableSizeLadder(table->rows.size());
    return std::to_string(fresh.size()) + "\n";
  }

  [[gnu::noinline]] std::string ExecUpdate(const Node& s) {
    Frame f(kExecUpdate);
    Table* table = Lookup(s.children[1].text);
    if (!table) {
      TOY_HIT(f, "unknown_table");
      throw ExecError("unknown table " + s.children[1].text);
    }
    const auto assigns = Elements(FindChild(s, "set")->children[1]);
    const Node* where = FindChild(s, "where");
    size_t changed = 0;
    if (!table->rows.empty()) {
      TOY_HIT(f, "indexed");
      RowIndex* volatile idx = table->index.get();
      for (size_t pos : idx->positions) {
        TOY_HIT(f, "row");
        Row& row = table->rows[pos];
        if (where && !Truthy(Evaluator(table, &row, nullptr).Eval(where->children[1])))
          continue;
        TOY_HIT(f, "row_match");
        Row updated = row;
        for (const Node* a : assigns) {
          TOY_HIT(f, "assign");
          auto i = table->ColumnIndex(a->children[0].text);
          if (!i) throw ExecError("unknown column " + a->children[0].text);
          Value v = Evaluator(table, &row, nullptr).Eval(a->children[2]);
          try {
            CheckType(table->columns[*i], v);
          } catch (const ExecError&) {
            TOY_HIT(f, "type_error");
            throw;
          }
          if (const auto* t = std::get_if<std::string>(&v); t && t->size() > kMaxTextLength) {
            TOY_HIT(f, "text_limit");
            throw ExecError("string too long");
          }
          updated[*i] = std::move(v);
        }
        row = std::move(updated);
        ++changed;
      }
    } else {
      TOY_HIT(f, "empty");
    }
    TOY_HIT(f, "done");
    return std::to_string(changed) + "\n";
  }

  [[gnu::noinline]] std::string ExecDelete(const Node& s) {
    Frame f(kExecDelete);
    Table* table = Lookup(s.children[2].text);
    if (!table) {
      TOY_HIT(f, "unknown_table");
      throw ExecError("unknown table " + s.children[2].text);
    }
    const Node* where = FindChild(s, "where");
    // Decide every row before touching the table: the predicate may throw.
    std::vector<bool> doomed;
    size_t removed = 0;
    for (const Row& row : table->rows) {
      TOY_HIT(f, "row");
      const bool match =
          !where || Truthy(Evaluator(table, &row, nullptr).Eval(where->children[1]));
      if (match) {
        TOY_HIT(f, "row_match");
        ++removed;
      }
      doomed.push_back(match);
    }
    std::vector<Row> kept;
    for (size_t i = 0; i < table->rows.size(); ++i)
      if (!doomed[i]) kept.push_back(std::move(table->rows[i]));
    table->rows = std::move(kept);
    if (table->index) {
      TOY_HIT(f, "reindex");
      table->RebuildIndex();
    }
    TOY_HIT(f, "done");
    return std::to_string(removed) + "\n";
  }

  [[gnu::noinline]] std::string ExecCreate(const Node& s) {
    Frame f(kExecCreate);
    const std::string& name = s.children[2].text;
    if (tables_.count(name)) {
      TOY_HIT(f, "exists");
      throw ExecError("table " + name + " already exists");
    }
    if (tables_.size() >= kMaxTables) {
      TOY_HIT(f, "table_limit");
      throw ExecError("too many tables");
    }
    Table t;
    for (const Node* def : Elements(*FindChild(s, "coldef_list"))) {
      TOY_HIT(f, "column");
      if (t.ColumnIndex(def->children[0].text) || t.columns.size() >= kMaxColumns) {
        TOY_HIT(f, "duplicate");
        throw ExecError("bad column " + def->children[0].text);
      }
      t.columns.push_back({def->children[0].text, *ParseColumnType(def->children[1].text)});
    }
    t.index = std::make_unique<RowIndex>();
    tables_.emplace(name, std::move(t));
    TOY_HIT(f, "done");
    return "";
  }

  [[gnu::noinline]] std::string ExecDrop(const Node& s) {
    Frame f(kExecDrop);
    if (!tables_.erase(s.children[2].text)) {
      TOY_HIT(f, "unknown_table");
      throw ExecError("unknown table " + s.children[2].text);
    }
    TOY_HIT(f, "done");
    return "";
  }

  [[gnu::noinline]] std::string ExecAlter(const Node& s) {
    Frame f(kExecAlter);
    const std::string& name = s.children[2].text;
    Table* table = Lookup(name);
    if (!table) {
      TOY_HIT(f, "unknown_table");
      throw ExecError("unknown table " + name);
    }
    const Node& action = s.children[3];
    const Node& last = action.children.back();
    if (action.tag == "add_column") {
      TOY_HIT(f, "add");
      Column c{last.children[0].text, *ParseColumnType(last.children[1].text)};
      if (table->ColumnIndex(c.name)) {
        TOY_HIT(f, "add_exists");
        throw ExecError("column " + c.name + " already exists");
      }
      if (table->columns.size() >= kMaxColumns) {
        TOY_HIT(f, "add_limit");
        throw ExecError("too many columns");
      }
      if (!table->rows.empty()) {
        TOY_HIT(f, "backfill");
        BackfillColumn(*table, c);
      }
      table->columns.push_back(std::move(c));
    } else if (action.tag == "drop_column") {
      TOY_HIT(f, "drop");
      auto i = table->ColumnIndex(last.text);
      if (!i) {
        TOY_HIT(f, "drop_unknown");
        throw ExecError("unknown column " + last.text);
      }
      if (table->columns.size() == 1) {
        TOY_HIT(f, "drop_last");
        throw ExecError("cannot drop the only column");
      }
      table->columns.erase(table->columns.begin() + static_cast<ptrdiff_t>(*i));
      for (Row& r : table->rows) r.erase(r.begin() + static_cast<ptrdiff_t>(*i));
    } else {
      TOY_HIT(f, "rename");
      if (tables_.count(last.text)) {
        TOY_HIT(f, "rename_exists");
        throw ExecError("table " + last.text + " already exists");
      }
      auto node = tables_.extract(name);
      node.key() = last.text;
      if (!node.mapped().rows.empty()) {
        TOY_HIT(f, "rename_reset");
        node.mapped().index.reset();
      }
      tables_.insert(std::move(node));
    }
    TOY_HIT(f, "done");
    return "";
  }

  [[gnu::noinline]] static void BackfillColumn(Table& table, const Column& column) {
    Frame f(kBackfillColumn);
    const std::string* volatile text_default = nullptr;
    for (Row& row : table.rows) {
      TOY_HIT(f, "row");
      if (column.type == ColumnType::kInt) {
        TOY_HIT(f, "int");
        row.emplace_back();
      } else {
        TOY_HIT(f, "text");
        std::string text(text_default->data(), text_default->size());
        row.emplace_back(std::move(text));
      }
    }
  }

 private:
  Table* Lookup(const std::string& name) {
    auto it = tables_.find(name);
    return it == tables_.end() ? nullptr : &it->second;
  }

  std::map<std::string, Table> tables_;
};

}  // namespace sqlcov::toydb

int main(int argc, char** argv) {
  using namespace sqlcov::toydb;
  return ServerMain(argc, argv, "storage", kStorageManifest, false, [](const ServerOptions& o) {
    int listen_fd = ListenUnix(o.listen_path);
    StorageEngine engine;
    // Analyze workers reuse the query server's connection while it waits.
    ServeForever(listen_fd, [&](const WireFrame& request) -> WireFrame {
      if (request.type != kPlanFrame) return {kErrorFrame, "expected a plan frame"};
      return engine.HandlePlan(request.payload);
    });
    return 0;
  });
}
