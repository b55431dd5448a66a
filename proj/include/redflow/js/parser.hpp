#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "redflow/js/ast.hpp"
#include "redflow/js/lexer.hpp"

namespace redflow::js {

struct SyntaxTree {
  std::string file;
  AstPtr program;
  std::vector<Diagnostic> parse_errors;
};

// Recursive-descent parser over the pre-lexed token stream. Never fails: a
// statement that cannot be parsed is recorded in parse_errors and replaced by
// an Error node, then parsing resynchronizes at the next statement boundary.
class Parser {
 public:
  Parser(std::string_view source, std::string file, int line_offset = 0)
      : file_(std::move(file)) {
    Lexer lexer(source, file_, line_offset);
    tokens_ = lexer.tokenize();
    for (const auto& d : lexer.diagnostics()) errors_.push_back(d);
  }

  SyntaxTree parse() {
    auto program = make_node(AstKind::Program, cur().line);
    while (!at_end()) {
      size_t before = idx_;
      program->add(parse_statement_safe());
      if (idx_ == before) advance(); // always make progress
    }
    return SyntaxTree{file_, std::move(program), std::move(errors_)};
  }

 private:
  struct ParseError {
    int line;
    std::string message;
  };

  std::string file_;
  std::vector<Token> tokens_;
  size_t idx_ = 0;
  int depth_ = 0;
  std::vector<Diagnostic> errors_;

  static constexpr int kMaxDepth = 300;

  const Token& cur() const { return tokens_[idx_]; }
  const Token& la(size_t k) const {
    size_t i = idx_ + k;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at_end() const { return cur().kind == TokKind::End; }
  void advance() {
    if (!at_end()) ++idx_;
  }
  bool match_punct(std::string_view p) {
    if (cur().is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }
  bool match_word(std::string_view w) {
    if (cur().is_word(w)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view p) {
    if (!match_punct(p)) fail(std::string("expected '") + std::string(p) + "'");
  }
  [[noreturn]] void fail(std::string msg) { throw ParseError{cur().line, std::move(msg)}; }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        --p.depth_;
        throw ParseError{p.cur().line, "nesting too deep"};
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  AstPtr parse_statement_safe() {
    try {
      return parse_statement();
    } catch (const ParseError& e) {
      errors_.push_back(make_error(file_, e.line, e.message));
      synchronize();
      return make_node(AstKind::Error, e.line);
    }
  }

  void synchronize() {
    while (!at_end()) {
      if (cur().is_punct(";")) {
        advance();
        return;
      }
      if (cur().is_punct("}")) return;
      if (cur().kind == TokKind::Word) {
        const std::string& w = cur().text;
        if (w == "function" || w == "var" || w == "let" || w == "const" ||
            w == "if" || w == "for" || w == "while" || w == "do" || w == "return" ||
            w == "try" || w == "switch" || w == "class" || w == "throw")
          return;
      }
      advance();
    }
  }

  // ---- statements ----

  AstPtr parse_statement() {
    DepthGuard guard(*this);
    const Token& t = cur();
    if (t.is_punct("{")) return parse_block();
    if (t.is_punct(";")) {
      advance();
      return make_node(AstKind::Empty, t.line);
    }
    if (t.kind == TokKind::Word) {
      const std::string& w = t.text;
      if (w == "var" || w == "let" || w == "const") {
        // "let" may be a plain identifier; only treat as declaration when a
        // binding target follows
        if (w != "let" || la(1).kind == TokKind::Word || la(1).is_punct("{") ||
            la(1).is_punct("[")) {
          auto decl = parse_var_decl();
          match_punct(";");
          return decl;
        }
      }
      if (w == "function") return parse_function(/*require_name=*/true, false);
      if (w == "async" && la(1).is_word("function")) {
        advance();
        auto fn = parse_function(true, false);
        fn->is_async = true;
        return fn;
      }
      if (w == "class") return parse_class();
      if (w == "if") return parse_if();
      if (w == "for") return parse_for();
      if (w == "while") return parse_while();
      if (w == "do") return parse_do_while();
      if (w == "return") return parse_return();
      if (w == "break" || w == "continue") {
        advance();
        auto node = make_node(w == "break" ? AstKind::Break : AstKind::Continue, t.line);
        if (cur().kind == TokKind::Word && cur().line == t.line) advance(); // label
        match_punct(";");
        return node;
      }
      if (w == "throw") {
        advance();
        auto node = make_node(AstKind::Throw, t.line);
        node->add(parse_expression());
        match_punct(";");
        return node;
      }
      if (w == "try") return parse_try();
      if (w == "switch") return parse_switch();
      if (w == "import" && !la(1).is_punct("(")) return parse_import();
      if (w == "export") return parse_export();
      if (w == "with") fail("'with' statements are not supported");
      // labeled statement
      if (la(1).is_punct(":")) {
        advance();
        advance();
        auto node = make_node(AstKind::Labeled, t.text, t.line);
        node->add(parse_statement());
        return node;
      }
    }
    auto stmt = make_node(AstKind::ExprStatement, t.line);
    stmt->add(parse_expression());
    match_punct(";");
    return stmt;
  }

  AstPtr parse_block() {
    int line = cur().line;
    expect_punct("{");
    auto block = make_node(AstKind::Block, line);
    while (!at_end() && !cur().is_punct("}")) {
      size_t before = idx_;
      block->add(parse_statement_safe());
      if (idx_ == before) advance();
    }
    expect_punct("}");
    return block;
  }

  AstPtr parse_var_decl() {
    int line = cur().line;
    std::string kind = cur().text;
    advance();
    auto decl = make_node(AstKind::VarDecl, kind, line);
    for (;;) {
      auto declarator = make_node(AstKind::Declarator, cur().line);
      declarator->add(parse_binding_target());
      if (match_punct("=")) declarator->add(parse_assignment());
      decl->add(std::move(declarator));
      if (!match_punct(",")) break;
    }
    return decl;
  }

  AstPtr parse_binding_target() {
    if (cur().is_punct("{")) return parse_object_pattern();
    if (cur().is_punct("[")) return parse_array_pattern();
    if (cur().kind != TokKind::Word) fail("expected binding name");
    auto id = make_node(AstKind::Identifier, cur().text, cur().line);
    advance();
    return id;
  }

  AstPtr parse_object_pattern() {
    int line = cur().line;
    expect_punct("{");
    auto pattern = make_node(AstKind::ObjectPattern, line);
    while (!at_end() && !cur().is_punct("}")) {
      if (match_punct("...")) {
        auto rest = make_node(AstKind::RestParam, cur().text, cur().line);
        advance();
        pattern->add(std::move(rest));
      } else {
        if (cur().kind != TokKind::Word && cur().kind != TokKind::String &&
            cur().kind != TokKind::Number)
          fail("expected property name in pattern");
        auto prop = make_node(AstKind::PatternProp, cur().text, cur().line);
        advance();
        if (match_punct(":")) {
          prop->add(parse_binding_target());
        } else {
          prop->add(make_node(AstKind::Identifier, prop->value, prop->line));
        }
        if (match_punct("=")) prop->add(parse_assignment());
        pattern->add(std::move(prop));
      }
      if (!match_punct(",")) break;
    }
    expect_punct("}");
    return pattern;
  }

  AstPtr parse_array_pattern() {
    int line = cur().line;
    expect_punct("[");
    auto pattern = make_node(AstKind::ArrayPattern, line);
    while (!at_end() && !cur().is_punct("]")) {
      if (cur().is_punct(",")) {
        pattern->add(make_node(AstKind::Empty, cur().line));
        advance();
        continue;
      }
      if (match_punct("...")) {
        auto rest = make_node(AstKind::RestParam, cur().text, cur().line);
        advance();
        pattern->add(std::move(rest));
      } else {
        auto target = parse_binding_target();
        if (match_punct("=")) {
          auto prop = make_node(AstKind::PatternProp, target->value, target->line);
          prop->add(std::move(target));
          prop->add(parse_assignment());
          pattern->add(std::move(prop));
        } else {
          pattern->add(std::move(target));
        }
      }
      if (!match_punct(",")) break;
    }
    expect_punct("]");
    return pattern;
  }

  AstPtr parse_function(bool require_name, bool arrow) {
    int line = cur().line;
    if (!arrow) {
      advance(); // 'function'
      match_punct("*");
    }
    std::string name;
    if (!arrow && cur().kind == TokKind::Word && !cur().is_punct("(")) {
      name = cur().text;
      advance();
    } else if (require_name) {
      fail("expected function name");
    }
    auto fn = make_node(AstKind::Function, name, line);
    fn->add(parse_params());
    fn->add(parse_block());
    return fn;
  }

  AstPtr parse_params() {
    int line = cur().line;
    expect_punct("(");
    auto params = make_node(AstKind::Params, line);
    while (!at_end() && !cur().is_punct(")")) {
      if (match_punct("...")) {
        auto rest = make_node(AstKind::RestParam, cur().text, cur().line);
        advance();
        params->add(std::move(rest));
      } else if (cur().is_punct("{") || cur().is_punct("[")) {
        params->add(parse_binding_target());
      } else {
        if (cur().kind != TokKind::Word) fail("expected parameter name");
        auto param = make_node(AstKind::Param, cur().text, cur().line);
        advance();
        if (match_punct("=")) param->add(parse_assignment());
        params->add(std::move(param));
      }
      if (!match_punct(",")) break;
    }
    expect_punct(")");
    return params;
  }

  AstPtr parse_class() {
    int line = cur().line;
    advance(); // 'class'
    std::string name;
    if (cur().kind == TokKind::Word && !cur().is_word("extends")) {
      name = cur().text;
      advance();
    }
    auto cls = make_node(AstKind::Class, name, line);
    if (match_word("extends")) cls->add(parse_unary());
    expect_punct("{");
    while (!at_end() && !cur().is_punct("}")) {
      if (match_punct(";")) continue;
      match_word("static");
      if ((cur().is_word("get") || cur().is_word("set")) && !la(1).is_punct("(")) advance();
      if (cur().is_word("async") && !la(1).is_punct("(")) advance();
      match_punct("*");
      std::string member_name = "<computed>";
      if (cur().is_punct("[")) {
        advance();
        parse_assignment();
        expect_punct("]");
      } else if (cur().kind == TokKind::Word || cur().kind == TokKind::String ||
                 cur().kind == TokKind::Number) {
        member_name = cur().text;
        advance();
      } else {
        fail("expected class member name");
      }
      if (cur().is_punct("(")) {
        auto method = make_node(AstKind::Function, member_name, cur().line);
        method->add(parse_params());
        method->add(parse_block());
        cls->add(std::move(method));
      } else {
        auto field = make_node(AstKind::Property, member_name, cur().line);
        if (match_punct("=")) field->add(parse_assignment());
        else field->add(make_node(AstKind::NullLiteral, cur().line));
        match_punct(";");
        cls->add(std::move(field));
      }
    }
    expect_punct("}");
    return cls;
  }

  AstPtr parse_if() {
    int line = cur().line;
    advance();
    expect_punct("(");
    auto node = make_node(AstKind::If, line);
    node->add(parse_expression());
    expect_punct(")");
    node->add(parse_statement());
    if (match_word("else")) node->add(parse_statement());
    return node;
  }

  AstPtr parse_for() {
    int line = cur().line;
    advance();
    expect_punct("(");
    AstPtr init;
    if (cur().is_punct(";")) {
      init = make_node(AstKind::Empty, cur().line);
    } else if (cur().is_word("var") || cur().is_word("let") || cur().is_word("const")) {
      init = parse_var_decl();
    } else {
      init = parse_expression();
    }
    if (cur().is_word("in") || cur().is_word("of")) {
      bool is_of = cur().is_word("of");
      advance();
      auto node = make_node(is_of ? AstKind::ForOf : AstKind::ForIn, line);
      node->add(std::move(init));
      node->add(parse_expression());
      expect_punct(")");
      node->add(parse_statement());
      return node;
    }
    auto node = make_node(AstKind::For, line);
    node->add(std::move(init));
    expect_punct(";");
    node->add(cur().is_punct(";") ? make_node(AstKind::Empty, cur().line)
                                  : parse_expression());
    expect_punct(";");
    node->add(cur().is_punct(")") ? make_node(AstKind::Empty, cur().line)
                                  : parse_expression());
    expect_punct(")");
    node->add(parse_statement());
    return node;
  }

  AstPtr parse_while() {
    int line = cur().line;
    advance();
    expect_punct("(");
    auto node = make_node(AstKind::While, line);
    node->add(parse_expression());
    expect_punct(")");
    node->add(parse_statement());
    return node;
  }

  AstPtr parse_do_while() {
    int line = cur().line;
    advance();
    auto node = make_node(AstKind::DoWhile, line);
    node->add(parse_statement());
    if (!match_word("while")) fail("expected 'while' after do body");
    expect_punct("(");
    node->add(parse_expression());
    expect_punct(")");
    match_punct(";");
    return node;
  }

  AstPtr parse_return() {
    int line = cur().line;
    advance();
    auto node = make_node(AstKind::Return, line);
    // semicolon insertion: a line break ends the return statement
    if (!cur().is_punct(";") && !cur().is_punct("}") && !at_end() && cur().line == line)
      node->add(parse_expression());
    match_punct(";");
    return node;
  }

  AstPtr parse_try() {
    int line = cur().line;
    advance();
    auto node = make_node(AstKind::Try, line);
    node->add(parse_block());
    if (cur().is_word("catch")) {
      int catch_line = cur().line;
      advance();
      std::string param;
      if (match_punct("(")) {
        if (cur().kind == TokKind::Word) {
          param = cur().text;
          advance();
        } else {
          parse_binding_target(); // destructured catch binding: names not seeded
        }
        expect_punct(")");
      }
      auto clause = make_node(AstKind::CatchClause, param, catch_line);
      clause->add(parse_block());
      node->add(std::move(clause));
    } else {
      node->add(make_node(AstKind::Empty, cur().line));
    }
    if (match_word("finally")) node->add(parse_block());
    else node->add(make_node(AstKind::Empty, cur().line));
    return node;
  }

  AstPtr parse_switch() {
    int line = cur().line;
    advance();
    expect_punct("(");
    auto node = make_node(AstKind::Switch, line);
    node->add(parse_expression());
    expect_punct(")");
    expect_punct("{");
    while (!at_end() && !cur().is_punct("}")) {
      int case_line = cur().line;
      AstPtr test;
      if (match_word("case")) {
        test = parse_expression();
      } else if (match_word("default")) {
        test = make_node(AstKind::Empty, case_line);
      } else {
        fail("expected 'case' or 'default'");
      }
      expect_punct(":");
      auto case_node = make_node(AstKind::Case, case_line);
      case_node->add(std::move(test));
      while (!at_end() && !cur().is_punct("}") && !cur().is_word("case") &&
             !cur().is_word("default")) {
        size_t before = idx_;
        case_node->add(parse_statement_safe());
        if (idx_ == before) advance();
      }
      node->add(std::move(case_node));
    }
    expect_punct("}");
    return node;
  }

  AstPtr parse_import() {
    int line = cur().line;
    advance(); // 'import'
    std::vector<AstPtr> bindings;
    if (cur().kind == TokKind::String) {
      auto node = make_node(AstKind::ImportDecl, cur().text, line);
      advance();
      match_punct(";");
      return node;
    }
    auto take_binding = [&](const std::string& name, int ln) {
      bindings.push_back(make_node(AstKind::Identifier, name, ln));
    };
    if (cur().kind == TokKind::Word) { // default binding
      take_binding(cur().text, cur().line);
      advance();
      match_punct(",");
    }
    if (match_punct("*")) {
      if (!match_word("as")) fail("expected 'as' in namespace import");
      if (cur().kind != TokKind::Word) fail("expected namespace binding name");
      take_binding(cur().text, cur().line);
      advance();
    } else if (cur().is_punct("{")) {
      advance();
      while (!at_end() && !cur().is_punct("}")) {
        if (cur().kind != TokKind::Word && cur().kind != TokKind::String)
          fail("expected import name");
        std::string name = cur().text;
        int ln = cur().line;
        advance();
        if (match_word("as")) {
          if (cur().kind != TokKind::Word) fail("expected import alias");
          name = cur().text;
          ln = cur().line;
          advance();
        }
        take_binding(name, ln);
        if (!match_punct(",")) break;
      }
      expect_punct("}");
    }
    if (!match_word("from")) fail("expected 'from' in import");
    if (cur().kind != TokKind::String) fail("expected module specifier");
    auto node = make_node(AstKind::ImportDecl, cur().text, line);
    advance();
    for (auto& b : bindings) node->add(std::move(b));
    match_punct(";");
    return node;
  }

  AstPtr parse_export() {
    int line = cur().line;
    advance(); // 'export'
    if (match_word("default")) {
      auto stmt = make_node(AstKind::ExprStatement, line);
      if (cur().is_word("function") || (cur().is_word("async") && la(1).is_word("function"))) {
        bool is_async = match_word("async");
        auto fn = parse_function(false, false);
        fn->is_async = is_async;
        stmt->add(std::move(fn));
      } else if (cur().is_word("class")) {
        stmt->add(parse_class());
      } else {
        stmt->add(parse_assignment());
      }
      match_punct(";");
      return stmt;
    }
    if (cur().is_word("var") || cur().is_word("let") || cur().is_word("const") ||
        cur().is_word("function") || cur().is_word("class") || cur().is_word("async"))
      return parse_statement();
    // export {..} [from 'm'] / export * from 'm': no local effect
    while (!at_end() && !cur().is_punct(";") && !cur().is_punct("}")) advance();
    match_punct(";");
    return make_node(AstKind::Empty, line);
  }

  // ---- expressions ----

  AstPtr parse_expression() {
    DepthGuard guard(*this);
    auto first = parse_assignment();
    if (!cur().is_punct(",")) return first;
    auto seq = make_node(AstKind::Sequence, first->line);
    seq->add(std::move(first));
    while (match_punct(",")) seq->add(parse_assignment());
    return seq;
  }

  bool looks_like_arrow_params() const {
    // at '(' — scan to the matching ')' and check for '=>'
    size_t i = idx_;
    int depth = 0;
    while (i < tokens_.size() && tokens_[i].kind != TokKind::End) {
      const Token& t = tokens_[i];
      if (t.kind == TokKind::Punct) {
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        else if (t.text == ")" || t.text == "]" || t.text == "}") {
          --depth;
          if (depth == 0) return i + 1 < tokens_.size() && tokens_[i + 1].is_punct("=>");
        }
      }
      ++i;
    }
    return false;
  }

  AstPtr parse_arrow_body(AstPtr params, int line, bool is_async) {
    auto fn = make_node(AstKind::Function, line);
    fn->arrow = true;
    fn->is_async = is_async;
    fn->add(std::move(params));
    if (cur().is_punct("{")) {
      fn->add(parse_block());
    } else {
      auto block = make_node(AstKind::Block, cur().line);
      auto ret = make_node(AstKind::Return, cur().line);
      ret->add(parse_assignment());
      block->add(std::move(ret));
      fn->add(std::move(block));
    }
    return fn;
  }

  AstPtr parse_assignment() {
    DepthGuard guard(*this);
    // arrow functions
    bool is_async = false;
    size_t saved = idx_;
    if (cur().is_word("async") && cur().line == la(1).line &&
        (la(1).is_punct("(") || (la(1).kind == TokKind::Word && la(2).is_punct("=>")))) {
      is_async = true;
      advance();
    }
    if (cur().kind == TokKind::Word && la(1).is_punct("=>") && !is_reserved_value(cur().text)) {
      auto params = make_node(AstKind::Params, cur().line);
      params->add(make_node(AstKind::Param, cur().text, cur().line));
      int line = cur().line;
      advance();
      advance(); // '=>'
      return parse_arrow_body(std::move(params), line, is_async);
    }
    if (cur().is_punct("(") && looks_like_arrow_params()) {
      int line = cur().line;
      auto params = parse_params();
      expect_punct("=>");
      return parse_arrow_body(std::move(params), line, is_async);
    }
    idx_ = saved;

    auto lhs = parse_conditional();
    static const char* assign_ops[] = {"=",  "+=", "-=",  "*=",  "/=",  "%=",  "**=",
                                       "<<=", ">>=", ">>>=", "&=", "|=", "^=",
                                       "&&=", "||=", "?\?="};
    for (const char* op : assign_ops) {
      if (cur().is_punct(op)) {
        int line = cur().line;
        advance();
        auto node = make_node(AstKind::Assign, op, line);
        node->add(std::move(lhs));
        node->add(parse_assignment());
        return node;
      }
    }
    return lhs;
  }

  static bool is_reserved_value(const std::string& w) {
    return w == "this" || w == "true" || w == "false" || w == "null" ||
           w == "new" || w == "typeof" || w == "delete" || w == "void" ||
           w == "in" || w == "of" || w == "instanceof" || w == "case";
  }

  AstPtr parse_conditional() {
    auto cond = parse_binary(0);
    if (!cur().is_punct("?") ) return cond;
    int line = cur().line;
    advance();
    auto node = make_node(AstKind::Conditional, line);
    node->add(std::move(cond));
    node->add(parse_assignment());
    expect_punct(":");
    node->add(parse_assignment());
    return node;
  }

  struct BinOp {
    const char* op;
    int prec;
    bool word;
    bool logical;
  };

  static const BinOp* find_binop(const Token& t) {
    static const BinOp ops[] = {
        {"??", 1, false, true},  {"||", 2, false, true},  {"&&", 3, false, true},
        {"|", 4, false, false},  {"^", 5, false, false},  {"&", 6, false, false},
        {"==", 7, false, false}, {"!=", 7, false, false}, {"===", 7, false, false},
        {"!==", 7, false, false},
        {"<", 8, false, false},  {">", 8, false, false},  {"<=", 8, false, false},
        {">=", 8, false, false}, {"instanceof", 8, true, false}, {"in", 8, true, false},
        {"<<", 9, false, false}, {">>", 9, false, false}, {">>>", 9, false, false},
        {"+", 10, false, false}, {"-", 10, false, false},
        {"*", 11, false, false}, {"/", 11, false, false}, {"%", 11, false, false},
        {"**", 12, false, false}};
    for (const auto& o : ops) {
      if (o.word ? t.is_word(o.op) : t.is_punct(o.op)) return &o;
    }
    return nullptr;
  }

  AstPtr parse_binary(int min_prec) {
    DepthGuard guard(*this);
    auto lhs = parse_unary();
    for (;;) {
      const BinOp* op = find_binop(cur());
      if (!op || op->prec < min_prec) return lhs;
      int line = cur().line;
      advance();
      // '**' is right-associative, everything else left
      auto rhs = parse_binary(op->prec + (std::string_view(op->op) == "**" ? 0 : 1));
      auto node = make_node(op->logical ? AstKind::Logical : AstKind::Binary, op->op, line);
      node->add(std::move(lhs));
      node->add(std::move(rhs));
      lhs = std::move(node);
    }
  }

  AstPtr parse_unary() {
    DepthGuard guard(*this);
    const Token& t = cur();
    static const char* prefix_puncts[] = {"!", "~", "+", "-", "++", "--"};
    for (const char* op : prefix_puncts) {
      if (t.is_punct(op)) {
        advance();
        auto node = make_node(std::string_view(op) == "++" || std::string_view(op) == "--"
                                  ? AstKind::Update
                                  : AstKind::Unary,
                              op, t.line);
        node->add(parse_unary());
        return node;
      }
    }
    static const char* prefix_words[] = {"typeof", "void", "delete", "await", "yield"};
    for (const char* op : prefix_words) {
      if (t.is_word(op)) {
        advance();
        auto node = make_node(AstKind::Unary, op, t.line);
        if (std::string_view(op) == "yield" &&
            (cur().is_punct(";") || cur().is_punct(")") || cur().is_punct("}")))
          return node;
        node->add(parse_unary());
        return node;
      }
    }
    return parse_postfix();
  }

  AstPtr parse_postfix() {
    auto expr = parse_call_chain(parse_primary());
    if ((cur().is_punct("++") || cur().is_punct("--")) && cur().line == expr->line) {
      auto node = make_node(AstKind::Update, cur().text, cur().line);
      advance();
      node->add(std::move(expr));
      return node;
    }
    return expr;
  }

  AstPtr parse_new() {
    int line = cur().line;
    advance(); // 'new'
    if (cur().is_punct(".")) { // new.target
      advance();
      advance();
      return make_node(AstKind::Identifier, "new.target", line);
    }
    auto callee = cur().is_word("new") ? parse_new() : parse_member_chain(parse_primary());
    auto node = make_node(AstKind::New, line);
    node->add(std::move(callee));
    if (cur().is_punct("(")) parse_arguments(*node);
    return parse_call_chain(std::move(node));
  }

  void parse_arguments(AstNode& call) {
    expect_punct("(");
    while (!at_end() && !cur().is_punct(")")) {
      if (match_punct("...")) {
        auto spread = make_node(AstKind::Spread, cur().line);
        spread->add(parse_assignment());
        call.add(std::move(spread));
      } else {
        call.add(parse_assignment());
      }
      if (!match_punct(",")) break;
    }
    expect_punct(")");
  }

  // member accesses only (for 'new' callees)
  AstPtr parse_member_chain(AstPtr expr) {
    for (;;) {
      if (cur().is_punct(".")) {
        int line = cur().line;
        advance();
        if (cur().kind != TokKind::Word) fail("expected property name");
        auto member = make_node(AstKind::Member, line);
        member->add(std::move(expr));
        member->add(make_node(AstKind::Identifier, cur().text, cur().line));
        advance();
        expr = std::move(member);
      } else if (cur().is_punct("[")) {
        int line = cur().line;
        advance();
        auto member = make_node(AstKind::Member, line);
        member->computed = true;
        member->add(std::move(expr));
        member->add(parse_expression());
        expect_punct("]");
        expr = std::move(member);
      } else {
        return expr;
      }
    }
  }

  AstPtr parse_call_chain(AstPtr expr) {
    DepthGuard guard(*this);
    for (;;) {
      if (cur().is_punct(".") || cur().is_punct("?.")) {
        bool optional = cur().is_punct("?.");
        int line = cur().line;
        advance();
        if (optional && cur().is_punct("(")) {
          auto call = make_node(AstKind::Call, line);
          call->add(std::move(expr));
          parse_arguments(*call);
          expr = std::move(call);
          continue;
        }
        if (optional && cur().is_punct("[")) {
          advance();
          auto member = make_node(AstKind::Member, line);
          member->computed = true;
          member->add(std::move(expr));
          member->add(parse_expression());
          expect_punct("]");
          expr = std::move(member);
          continue;
        }
        if (cur().kind != TokKind::Word) fail("expected property name");
        auto member = make_node(AstKind::Member, line);
        member->add(std::move(expr));
        member->add(make_node(AstKind::Identifier, cur().text, cur().line));
        advance();
        expr = std::move(member);
      } else if (cur().is_punct("[")) {
        int line = cur().line;
        advance();
        auto member = make_node(AstKind::Member, line);
        member->computed = true;
        member->add(std::move(expr));
        member->add(parse_expression());
        expect_punct("]");
        expr = std::move(member);
      } else if (cur().is_punct("(")) {
        auto call = make_node(AstKind::Call, cur().line);
        call->add(std::move(expr));
        parse_arguments(*call);
        expr = std::move(call);
      } else if (cur().kind == TokKind::TemplateNoSub || cur().kind == TokKind::TemplateHead) {
        // tagged template: model as a call taking the embedded expressions
        auto call = make_node(AstKind::Call, cur().line);
        call->add(std::move(expr));
        auto tpl = parse_template();
        for (auto& part : tpl->children) call->add(std::move(part));
        expr = std::move(call);
      } else {
        return expr;
      }
    }
  }

  AstPtr parse_template() {
    int line = cur().line;
    auto tpl = make_node(AstKind::TemplateLiteral, line);
    if (cur().kind == TokKind::TemplateNoSub) {
      tpl->value = cur().text;
      advance();
      return tpl;
    }
    advance(); // TemplateHead
    for (;;) {
      tpl->add(parse_expression());
      if (cur().kind == TokKind::TemplateMiddle) {
        advance();
        continue;
      }
      if (cur().kind == TokKind::TemplateTail) {
        advance();
        return tpl;
      }
      fail("unterminated template literal");
    }
  }

  AstPtr parse_primary() {
    DepthGuard guard(*this);
    const Token& t = cur();
    switch (t.kind) {
      case TokKind::Number: {
        advance();
        return make_node(AstKind::Number, t.text, t.line);
      }
      case TokKind::String: {
        advance();
        return make_node(AstKind::String, t.text, t.line);
      }
      case TokKind::Regex: {
        advance();
        return make_node(AstKind::Regex, t.text, t.line);
      }
      case TokKind::TemplateNoSub:
      case TokKind::TemplateHead:
        return parse_template();
      case TokKind::Punct: {
        if (t.text == "(") {
          advance();
          auto inner = parse_expression();
          expect_punct(")");
          return inner;
        }
        if (t.text == "[") return parse_array_literal();
        if (t.text == "{") return parse_object_literal();
        fail("unexpected token '" + t.text + "'");
      }
      case TokKind::Word: {
        if (t.text == "function") return parse_function(false, false);
        if (t.text == "async" && la(1).is_word("function")) {
          advance();
          auto fn = parse_function(false, false);
          fn->is_async = true;
          return fn;
        }
        if (t.text == "class") return parse_class();
        if (t.text == "new") return parse_new();
        if (t.text == "this") {
          advance();
          return make_node(AstKind::ThisExpr, t.line);
        }
        if (t.text == "super") {
          advance();
          return make_node(AstKind::SuperExpr, t.line);
        }
        if (t.text == "true" || t.text == "false") {
          advance();
          return make_node(AstKind::BoolLiteral, t.text, t.line);
        }
        if (t.text == "null" || t.text == "undefined") {
          advance();
          return make_node(AstKind::NullLiteral, t.text, t.line);
        }
        advance();
        return make_node(AstKind::Identifier, t.text, t.line);
      }
      default:
        fail("unexpected end of input");
    }
  }

  AstPtr parse_array_literal() {
    int line = cur().line;
    expect_punct("[");
    auto arr = make_node(AstKind::Array, line);
    while (!at_end() && !cur().is_punct("]")) {
      if (cur().is_punct(",")) {
        advance();
        continue;
      }
      if (match_punct("...")) {
        auto spread = make_node(AstKind::Spread, cur().line);
        spread->add(parse_assignment());
        arr->add(std::move(spread));
      } else {
        arr->add(parse_assignment());
      }
      if (!cur().is_punct("]")) {
        if (!match_punct(",")) break;
      }
    }
    expect_punct("]");
    return arr;
  }

  AstPtr parse_object_literal() {
    int line = cur().line;
    expect_punct("{");
    auto obj = make_node(AstKind::Object, line);
    while (!at_end() && !cur().is_punct("}")) {
      if (match_punct("...")) {
        auto spread = make_node(AstKind::Spread, cur().line);
        spread->add(parse_assignment());
        obj->add(std::move(spread));
        if (!match_punct(",")) break;
        continue;
      }
      bool accessor = false;
      if ((cur().is_word("get") || cur().is_word("set")) &&
          (la(1).kind == TokKind::Word || la(1).kind == TokKind::String ||
           la(1).kind == TokKind::Number || la(1).is_punct("["))) {
        accessor = true;
        advance();
      }
      if (cur().is_word("async") &&
          (la(1).kind == TokKind::Word || la(1).is_punct("["))) {
        advance();
      }
      match_punct("*");
      std::string key = "<computed>";
      AstPtr computed_key;
      int key_line = cur().line;
      if (cur().is_punct("[")) {
        advance();
        computed_key = parse_assignment();
        expect_punct("]");
      } else if (cur().kind == TokKind::Word || cur().kind == TokKind::String ||
                 cur().kind == TokKind::Number) {
        key = cur().text;
        advance();
      } else {
        fail("expected property key");
      }
      auto prop = make_node(AstKind::Property, key, key_line);
      if (cur().is_punct("(")) { // method / accessor
        auto method = make_node(AstKind::Function, key, key_line);
        method->add(parse_params());
        method->add(parse_block());
        prop->add(std::move(method));
      } else if (match_punct(":")) {
        prop->add(parse_assignment());
      } else if (!accessor) { // shorthand
        prop->add(make_node(AstKind::Identifier, key, key_line));
        if (match_punct("=")) prop->add(parse_assignment()); // inside destructuring reuse
      } else {
        fail("malformed accessor property");
      }
      if (computed_key) prop->add(std::move(computed_key));
      obj->add(std::move(prop));
      if (!match_punct(",")) break;
    }
    expect_punct("}");
    return obj;
  }
};

inline SyntaxTree parse_js(std::string_view source, std::string file, int line_offset = 0) {
  Parser parser(source, std::move(file), line_offset);
  return parser.parse();
}

} // namespace redflow::js
