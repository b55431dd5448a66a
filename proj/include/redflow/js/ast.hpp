#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace redflow::js {

enum class AstKind {
  Program,
  // literals and names
  Number,
  String,
  Regex,
  BoolLiteral,
  NullLiteral,
  Identifier,
  ThisExpr,
  SuperExpr,
  TemplateLiteral, // children: embedded expressions (text chunks dropped)
  // composite expressions
  Array,          // children: elements
  Object,         // children: Property / Spread
  Property,       // value = key name ("" when computed); child0 = value expr; child1 (optional) = computed key expr
  Spread,         // child0 = argument
  Function,       // value = name (may be empty); child0 = Params, child1 = Block; flags: arrow/async
  Params,         // children: Param / RestParam / pattern nodes
  Param,          // value = name; optional child0 = default expr
  RestParam,      // value = name
  ObjectPattern,  // children: PatternProp
  PatternProp,    // value = key; child0 = nested target (Identifier/pattern); optional child1 = default
  ArrayPattern,   // children: targets (Identifier/pattern/Empty/RestParam)
  Class,          // value = name; child0 (optional) = extends expr; rest = member Functions / field Properties
  Call,           // child0 = callee; rest = arguments
  New,            // child0 = callee; rest = arguments
  Member,         // child0 = object; child1 = Identifier (property name) or computed expr; flag computed
  Assign,         // value = operator; child0 = target; child1 = rhs
  Binary,         // value = operator
  Logical,        // value = operator (&& || ??)
  Unary,          // value = operator (incl. typeof/delete/void/await)
  Update,         // value = ++/--
  Conditional,    // cond, then, else
  Sequence,       // children: expressions
  // statements
  Block,
  VarDecl,        // value = var/let/const; children: Declarator
  Declarator,     // child0 = target (Identifier or pattern); optional child1 = init
  ExprStatement,  // child0 = expression
  If,             // cond, then, optional else
  For,            // children: init?, test?, update?, body (missing parts = Empty)
  ForIn,          // child0 = target decl/expr, child1 = object, child2 = body
  ForOf,          // same layout as ForIn
  While,          // cond, body
  DoWhile,        // body, cond
  Return,         // optional child0
  Break,
  Continue,
  Throw,          // child0
  Try,            // child0 = block; child1 = CatchClause or Empty; child2 = finally Block or Empty
  CatchClause,    // value = parameter name ("" when absent/pattern); child0 = Block
  Switch,         // child0 = discriminant; rest = Case
  Case,           // child0 = test or Empty (default); rest = statements
  Labeled,        // value = label; child0 = statement
  ImportDecl,     // value = module specifier; children: Identifier bindings
  Empty,
  Error,          // skipped region
};

struct AstNode {
  AstKind kind;
  std::string value;
  int line = 0;
  bool computed = false; // Member: bracket access
  bool arrow = false;    // Function: arrow form
  bool is_async = false; // Function
  std::vector<std::unique_ptr<AstNode>> children;

  AstNode(AstKind k, int ln) : kind(k), line(ln) {}
  AstNode(AstKind k, std::string v, int ln) : kind(k), value(std::move(v)), line(ln) {}

  AstNode* child(size_t i) const {
    return i < children.size() ? children[i].get() : nullptr;
  }
  AstNode* add(std::unique_ptr<AstNode> c) {
    children.push_back(std::move(c));
    return children.back().get();
  }
};

using AstPtr = std::unique_ptr<AstNode>;

inline AstPtr make_node(AstKind k, int line) { return std::make_unique<AstNode>(k, line); }
inline AstPtr make_node(AstKind k, std::string v, int line) {
  return std::make_unique<AstNode>(k, std::move(v), line);
}

// Non-computed dotted chain ("node.credentials.password") rooted at an
// identifier or this. Returns segments from root to leaf, or empty when the
// expression is not a plain chain.
inline std::vector<std::string> member_chain(const AstNode* n) {
  std::vector<std::string> rev;
  while (n) {
    if (n->kind == AstKind::Identifier) {
      rev.push_back(n->value);
      break;
    }
    if (n->kind == AstKind::ThisExpr) {
      rev.push_back("this");
      break;
    }
    if (n->kind == AstKind::Member && !n->computed && n->child(1) &&
        n->child(1)->kind == AstKind::Identifier) {
      rev.push_back(n->child(1)->value);
      n = n->child(0);
      continue;
    }
    return {};
  }
  if (rev.empty()) return {};
  return {rev.rbegin(), rev.rend()};
}

inline std::string join_chain(const std::vector<std::string>& chain) {
  std::string out;
  for (const auto& seg : chain) {
    if (!out.empty()) out.push_back('.');
    out += seg;
  }
  return out;
}

// Callee display text for endpoint records.
inline std::string callee_text(const AstNode* callee) {
  auto chain = member_chain(callee);
  if (!chain.empty()) return join_chain(chain);
  if (callee->kind == AstKind::Member && callee->child(1) &&
      callee->child(1)->kind == AstKind::Identifier)
    return "<expr>." + callee->child(1)->value;
  return "<expr>";
}

template <typename Fn>
void walk(AstNode* n, Fn&& fn) {
  if (!n) return;
  fn(n);
  for (auto& c : n->children) walk(c.get(), fn);
}

} // namespace redflow::js
