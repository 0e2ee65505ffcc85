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

#include "sqlcov/sql/ast.h"

namespace sqlcov::sql {

std::string_view KindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kScript: return "script";
    case NodeKind::kStatement: return "statement";
    case NodeKind::kClause: return "clause";
    case NodeKind::kExpression: return "expression";
    case NodeKind::kIdentifier: return "identifier";
    case NodeKind::kLiteral: return "literal";
    case NodeKind::kKeyword: return "keyword";
  }
  return "?";
}

bool Node::is_list() const {
  return kind == NodeKind::kClause && tag.size() > 5 &&
         tag.compare(tag.size() - 5, 5, "_list") == 0;
}

bool Node::is_expression() const {
  switch (kind) {
    case NodeKind::kExpression: return true;
    case NodeKind::kIdentifier: return tag == "column";
    case NodeKind::kLiteral: return tag != "count";
    default: return false;
  }
}

Node MakeKeyword(std::string text) {
  Node n;
  n.kind = NodeKind::kKeyword;
  n.text = std::move(text);
  return n;
}

namespace {

struct Emitter {
  std::string out;
  bool glue_next = false;

  void Leaf(const std::string& text) {
    bool glue = out.empty() || glue_next || text == "," || text == ")";
    if (!glue) out += ' ';
    out += text;
    glue_next = text == "(";
  }

  void Walk(const Node& n) {
    if (n.is_leaf()) {
      Leaf(n.text);
      return;
    }
    const bool call = n.tag == "call";
    for (size_t i = 0; i < n.children.size(); ++i) {
      const Node& c = n.children[i];
      // `f(`: the parenthesis after a function name hugs it.
      if (call && c.kind == NodeKind::kKeyword && c.text == "(" && i > 0 &&
          n.children[i - 1].kind == NodeKind::kIdentifier)
        glue_next = true;
      Walk(c);
    }
  }
};

}  // namespace

std::string Serialize(const Node& node) {
  if (node.kind == NodeKind::kScript) {
    std::string out;
    for (const auto& s : node.children) {
      if (!out.empty()) out += ' ';
      out += Serialize(s);
      out += ';';
    }
    return out;
  }
  Emitter e;
  e.Walk(node);
  return std::move(e.out);
}

std::string Serialize(const Ast& ast) { return Serialize(ast.root); }

std::vector<std::string> SerializeStatements(const Ast& ast) {
  std::vector<std::string> out;
  for (const auto& s : ast.root.children) out.push_back(Serialize(s));
  return out;
}

bool StructurallyEqual(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.tag != b.tag || a.text != b.text ||
      a.children.size() != b.children.size())
    return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!StructurallyEqual(a.children[i], b.children[i])) return false;
  return true;
}

size_t NodeCount(const Node& node) {
  size_t n = 1;
  for (const auto& c : node.children) n += NodeCount(c);
  return n;
}

}  // namespace sqlcov::sql
