#include <catch2/catch_amalgamated.hpp>

#include "redflow/js/lexer.hpp"
#include "redflow/js/parser.hpp"

using namespace redflow;
using namespace redflow::js;

namespace {

std::vector<Token> lex(std::string_view src) {
  return Lexer(src, "t.js").tokenize();
}

SyntaxTree parse(std::string_view src) { return parse_js(src, "t.js"); }

// First node of the requested kind, depth-first.
const AstNode* find_kind(const AstNode* n, AstKind k) {
  if (!n) return nullptr;
  if (n->kind == k) return n;
  for (auto& c : n->children)
    if (const AstNode* hit = find_kind(c.get(), k)) return hit;
  return nullptr;
}

int count_kind(const AstNode* n, AstKind k) {
  int total = 0;
  walk(const_cast<AstNode*>(n), [&](AstNode* m) { total += m->kind == k ? 1 : 0; });
  return total;
}

} // namespace

TEST_CASE("lexer splits words, numbers, strings, and punctuation") {
  auto toks = lex("var x = 42 + 'hi';");
  REQUIRE(toks.size() == 8); // var x = 42 + 'hi' ; End
  CHECK(toks[0].is_word("var"));
  CHECK(toks[1].is_word("x"));
  CHECK(toks[2].is_punct("="));
  CHECK(toks[3].kind == TokKind::Number);
  CHECK(toks[3].text == "42");
  CHECK(toks[5].kind == TokKind::String);
  CHECK(toks[5].text == "hi");
  CHECK(toks[6].is_punct(";"));
  CHECK(toks[7].kind == TokKind::End);
}

TEST_CASE("lexer cooks escapes and tracks token offsets") {
  auto toks = lex(R"(f("a\n\"b"))");
  REQUIRE(toks[2].kind == TokKind::String);
  CHECK(toks[2].text == "a\n\"b");
  // offsets cover the raw literal including quotes
  CHECK(toks[2].begin == 2);
  CHECK(toks[2].end == 10);
}

TEST_CASE("lexer counts lines through comments and strings") {
  auto toks = lex("a\n// note\nb /* c\nd */ e");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].line == 1);
  CHECK(toks[1].line == 3); // b
  CHECK(toks[2].line == 4); // e, after the multi-line comment
}

TEST_CASE("lexer honors the line offset for embedded regions") {
  Lexer lx("x = 1;", "t.html", 10);
  auto toks = lx.tokenize();
  CHECK(toks[0].line == 11);
}

TEST_CASE("lexer separates regex literals from division") {
  auto toks = lex("a = b / c; r = /ab[/]c/gi;");
  int regexes = 0, slashes = 0;
  for (auto& t : toks) {
    if (t.kind == TokKind::Regex) ++regexes;
    if (t.is_punct("/")) ++slashes;
  }
  CHECK(regexes == 1);
  CHECK(slashes == 1);
  // after return a slash starts a regex
  auto toks2 = lex("function f() { return /x/; }");
  bool saw = false;
  for (auto& t : toks2) saw = saw || t.kind == TokKind::Regex;
  CHECK(saw);
}

TEST_CASE("lexer tokenizes template literals with substitutions") {
  auto toks = lex("`a${x}b${y}c`");
  REQUIRE(toks.size() >= 6);
  CHECK(toks[0].kind == TokKind::TemplateHead);
  CHECK(toks[0].text == "a");
  CHECK(toks[1].is_word("x"));
  CHECK(toks[2].kind == TokKind::TemplateMiddle);
  CHECK(toks[4].kind == TokKind::TemplateTail);
  CHECK(toks[4].text == "c");
  // nested braces inside the substitution do not end it
  auto toks2 = lex("`v${ {a: 1} }w`");
  CHECK(toks2.front().kind == TokKind::TemplateHead);
  CHECK(toks2[toks2.size() - 2].kind == TokKind::TemplateTail);
}

TEST_CASE("lexer reports unterminated constructs and keeps going") {
  Lexer lx("var s = 'open\nvar t = 2;", "t.js");
  auto toks = lx.tokenize();
  REQUIRE_FALSE(lx.diagnostics().empty());
  CHECK(lx.diagnostics()[0].message == "unterminated string literal");
  bool saw_t = false;
  for (auto& t : toks) saw_t = saw_t || t.is_word("t");
  CHECK(saw_t);
}

TEST_CASE("lexer scans multi-character punctuators greedily") {
  auto toks = lex("a >>>= b; c ?\?= d; e ** f; g?.h");
  std::vector<std::string> puncts;
  for (auto& t : toks)
    if (t.kind == TokKind::Punct) puncts.push_back(t.text);
  CHECK(std::find(puncts.begin(), puncts.end(), ">>>=") != puncts.end());
  CHECK(std::find(puncts.begin(), puncts.end(), "?\?=") != puncts.end());
  CHECK(std::find(puncts.begin(), puncts.end(), "**") != puncts.end());
  CHECK(std::find(puncts.begin(), puncts.end(), "?.") != puncts.end());
}

TEST_CASE("parser builds declarations with line numbers") {
  auto tree = parse("var a = 1;\nlet b = a + 2;");
  REQUIRE(tree.parse_errors.empty());
  REQUIRE(tree.program->children.size() == 2);
  const AstNode* first = tree.program->child(0);
  CHECK(first->kind == AstKind::VarDecl);
  CHECK(first->value == "var");
  CHECK(first->line == 1);
  const AstNode* second = tree.program->child(1);
  CHECK(second->value == "let");
  CHECK(second->line == 2);
  const AstNode* bin = find_kind(second, AstKind::Binary);
  REQUIRE(bin != nullptr);
  CHECK(bin->value == "+");
}

TEST_CASE("parser shapes calls, members, and news") {
  auto tree = parse("node.send([msg, null]);\nvar c = new Client(url);");
  const AstNode* call = find_kind(tree.program.get(), AstKind::Call);
  REQUIRE(call != nullptr);
  auto chain = member_chain(call->child(0));
  REQUIRE(chain.size() == 2);
  CHECK(chain[0] == "node");
  CHECK(chain[1] == "send");
  CHECK(call->children.size() == 2); // callee + one array argument
  CHECK(call->child(1)->kind == AstKind::Array);
  const AstNode* nw = find_kind(tree.program.get(), AstKind::New);
  REQUIRE(nw != nullptr);
  CHECK(nw->child(0)->value == "Client");
}

TEST_CASE("parser handles function forms and parameters") {
  auto tree = parse(
      "function f(a, b) { return a; }\n"
      "var g = (x) => x + 1;\n"
      "var h = async function(...rest) {};");
  REQUIRE(tree.parse_errors.empty());
  CHECK(count_kind(tree.program.get(), AstKind::Function) == 3);
  const AstNode* f = find_kind(tree.program.get(), AstKind::Function);
  CHECK(f->value == "f");
  CHECK_FALSE(f->arrow);
  const AstNode* params = f->child(0);
  REQUIRE(params->kind == AstKind::Params);
  REQUIRE(params->children.size() == 2);
  CHECK(params->child(0)->value == "a");
  CHECK(count_kind(tree.program.get(), AstKind::RestParam) == 1);
}

TEST_CASE("parser captures destructuring patterns") {
  auto tree = parse("const {a, b: {c}} = obj; const [d, , e] = arr;");
  REQUIRE(tree.parse_errors.empty());
  CHECK(count_kind(tree.program.get(), AstKind::ObjectPattern) == 2);
  CHECK(count_kind(tree.program.get(), AstKind::ArrayPattern) == 1);
  const AstNode* op = find_kind(tree.program.get(), AstKind::ObjectPattern);
  CHECK(op->children.size() == 2);
}

TEST_CASE("parser distinguishes computed member access") {
  auto tree = parse("a.b.c; a['b'];");
  const AstNode* dotted = find_kind(tree.program->child(0), AstKind::Member);
  REQUIRE(dotted != nullptr);
  CHECK_FALSE(dotted->computed);
  auto chain = member_chain(dotted);
  REQUIRE(chain.size() == 3);
  CHECK(join_chain(chain) == "a.b.c");
  const AstNode* bracket = find_kind(tree.program->child(1), AstKind::Member);
  REQUIRE(bracket != nullptr);
  CHECK(bracket->computed);
  CHECK(member_chain(bracket).empty());
}

TEST_CASE("parser keeps statement structure for control flow") {
  auto tree = parse(
      "if (a) { b(); } else { c(); }\n"
      "for (var i = 0; i < 3; i++) d(i);\n"
      "try { e(); } catch (err) { f(err); } finally { g(); }\n"
      "switch (x) { case 1: h(); break; default: k(); }");
  REQUIRE(tree.parse_errors.empty());
  CHECK(count_kind(tree.program.get(), AstKind::If) == 1);
  CHECK(count_kind(tree.program.get(), AstKind::For) == 1);
  const AstNode* katch = find_kind(tree.program.get(), AstKind::CatchClause);
  REQUIRE(katch != nullptr);
  CHECK(katch->value == "err");
  CHECK(count_kind(tree.program.get(), AstKind::Case) == 2);
}

TEST_CASE("parser records errors and resynchronizes") {
  auto tree = parse("var a = 1;\nvar = = ;\nvar b = 2;");
  CHECK_FALSE(tree.parse_errors.empty());
  // the surrounding statements still parse
  bool saw_a = false, saw_b = false;
  walk(tree.program.get(), [&](AstNode* n) {
    if (n->kind == AstKind::Declarator && n->child(0)) {
      saw_a = saw_a || n->child(0)->value == "a";
      saw_b = saw_b || n->child(0)->value == "b";
    }
  });
  CHECK(saw_a);
  CHECK(saw_b);
  CHECK(count_kind(tree.program.get(), AstKind::Error) >= 1);
}

TEST_CASE("parser shapes object literals and spreads") {
  auto tree = parse("var o = {a: 1, 'b c': 2, [k]: 3, d, ...rest};");
  REQUIRE(tree.parse_errors.empty());
  const AstNode* obj = find_kind(tree.program.get(), AstKind::Object);
  REQUIRE(obj != nullptr);
  REQUIRE(obj->children.size() == 5);
  CHECK(obj->child(0)->value == "a");
  CHECK(obj->child(1)->value == "b c");
  CHECK(obj->child(2)->value == "<computed>");
  CHECK(obj->child(4)->kind == AstKind::Spread);
}

TEST_CASE("parser understands classes and methods") {
  auto tree = parse(
      "class Reader extends Base {\n"
      "  constructor(cfg) { super(); this.cfg = cfg; }\n"
      "  read() { return this.cfg; }\n"
      "}");
  REQUIRE(tree.parse_errors.empty());
  const AstNode* cls = find_kind(tree.program.get(), AstKind::Class);
  REQUIRE(cls != nullptr);
  CHECK(cls->value == "Reader");
  CHECK(cls->child(0)->value == "Base");
  CHECK(count_kind(cls, AstKind::Function) == 2);
}

TEST_CASE("callee_text names plain chains and falls back for expressions") {
  auto tree = parse("a.b(); (x || y).f(); (q())();");
  const AstNode* c0 = find_kind(tree.program->child(0), AstKind::Call);
  CHECK(callee_text(c0->child(0)) == "a.b");
  const AstNode* c1 = find_kind(tree.program->child(1), AstKind::Call);
  CHECK(callee_text(c1->child(0)) == "<expr>.f");
}

TEST_CASE("parser line numbers survive a line offset") {
  auto tree = parse_js("x();\ny();", "t.html", 99);
  REQUIRE(tree.program->children.size() == 2);
  CHECK(find_kind(tree.program->child(0), AstKind::Call)->line == 100);
  CHECK(find_kind(tree.program->child(1), AstKind::Call)->line == 101);
}

TEST_CASE("parser tolerates modern syntax it does not model") {
  // optional chains, nullish, exponent, async arrows: no parse errors
  auto tree = parse(
      "const v = a?.b ?? c ** 2;\n"
      "const w = async () => { await f(); };\n"
      "label: for (const k of items) { if (k) continue label; }");
  CHECK(tree.parse_errors.empty());
}
