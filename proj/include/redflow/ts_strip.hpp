#pragma once

// Lexical TypeScript-to-JavaScript stripping. Replaces type-level syntax with
// spaces so that byte offsets and line/column positions of the surviving
// JavaScript are unchanged. Handles the common annotation forms found in
// published node sources; constructs it cannot strip are left in place and
// surface later as parse diagnostics on the affected file.

#include <string>
#include <string_view>
#include <vector>

#include "redflow/js/lexer.hpp"

namespace redflow {

namespace detail_ts {

inline bool is_reserved_js(const std::string& w) {
  static const char* kw[] = {
      "break",    "case",     "catch",  "class",  "const",    "continue",
      "debugger", "default",  "delete", "do",     "else",     "export",
      "extends",  "finally",  "for",    "function", "if",     "import",
      "in",       "instanceof", "new",  "return", "super",    "switch",
      "this",     "throw",    "try",    "typeof", "var",      "void",
      "while",    "with",     "yield",  "await",  "let",      "static",
      "get",      "set",      "of",     "async"};
  for (const char* k : kw)
    if (w == k) return true;
  return false;
}

} // namespace detail_ts

class TsStripper {
 public:
  explicit TsStripper(std::string_view source) : src_(source) {
    js::Lexer lex(source, "<ts>");
    toks_ = lex.tokenize();
    if (!toks_.empty() && toks_.back().kind == js::TokKind::End) toks_.pop_back();
    keep_.assign(toks_.size(), true);
  }

  std::string strip() {
    mark_class_bodies();
    size_t i = 0;
    while (i < toks_.size()) i = handle(i);
    std::string out(src_);
    for (size_t t = 0; t < toks_.size(); ++t) {
      if (keep_[t]) continue;
      for (size_t p = toks_[t].begin; p < toks_[t].end && p < out.size(); ++p)
        if (out[p] != '\n') out[p] = ' ';
    }
    return out;
  }

 private:
  std::string_view src_;
  std::vector<js::Token> toks_;
  std::vector<bool> keep_;
  // [open,close] token-index ranges of class body braces
  std::vector<std::pair<size_t, size_t>> class_bodies_;

  const js::Token& tok(size_t i) const {
    static js::Token end{js::TokKind::End, "", 0, 0, 0};
    return i < toks_.size() ? toks_[i] : end;
  }
  bool word(size_t i, std::string_view w) const { return tok(i).is_word(w); }
  bool punct(size_t i, std::string_view p) const { return tok(i).is_punct(p); }

  void blank(size_t i) {
    if (i < keep_.size()) keep_[i] = false;
  }
  void blank_range(size_t from, size_t to_excl) {
    for (size_t i = from; i < to_excl && i < keep_.size(); ++i) keep_[i] = false;
  }

  // Counts '>' characters so that >> and >>> close nested generics.
  static int closes(const js::Token& t) {
    if (t.kind != js::TokKind::Punct) return 0;
    int n = 0;
    for (char c : t.text)
      if (c == '>') ++n;
      else return 0;
    return n;
  }

  // Token index just past a brace block opening at `open` (which must be "{").
  size_t skip_braces(size_t open) const {
    int depth = 0;
    size_t i = open;
    for (; i < toks_.size(); ++i) {
      if (punct(i, "{")) ++depth;
      else if (punct(i, "}")) {
        if (--depth == 0) return i + 1;
      }
    }
    return i;
  }

  size_t skip_parens(size_t open) const {
    int depth = 0;
    size_t i = open;
    for (; i < toks_.size(); ++i) {
      if (punct(i, "(")) ++depth;
      else if (punct(i, ")")) {
        if (--depth == 0) return i + 1;
      }
    }
    return i;
  }

  // Balanced generic argument list starting at "<"; returns index past the
  // matching close, or `open` if it does not close on the same statement.
  size_t skip_generics(size_t open) const {
    int depth = 0;
    for (size_t i = open; i < toks_.size(); ++i) {
      const js::Token& t = tok(i);
      if (t.is_punct("<")) ++depth;
      else if (int n = closes(t); n > 0) {
        depth -= n;
        if (depth <= 0) return i + 1;
      } else if (t.is_punct(";") || t.is_punct("{"))
        return open;
    }
    return open;
  }

  bool statement_start(size_t i) const {
    if (i == 0) return true;
    const js::Token& p = tok(i - 1);
    return p.is_punct(";") || p.is_punct("{") || p.is_punct("}") ||
           p.is_word("export") || p.is_word("declare");
  }

  void mark_class_bodies() {
    for (size_t i = 0; i + 1 < toks_.size(); ++i) {
      if (!word(i, "class")) continue;
      size_t j = i + 1;
      while (j < toks_.size() && !punct(j, "{") && !punct(j, ";")) ++j;
      if (j < toks_.size() && punct(j, "{"))
        class_bodies_.emplace_back(j, skip_braces(j) - 1);
    }
  }

  bool in_class_body(size_t i) const {
    for (auto& [a, b] : class_bodies_)
      if (i > a && i < b) return true;
    return false;
  }

  // Consumes one type expression after a ':' or 'as'. Stops at depth zero
  // before '=', ',', ';', ')', ']', '}' and before '{' unless the brace opens
  // an object type directly in type position.
  size_t skip_type(size_t i) const {
    int depth = 0;
    bool any = false;
    bool brace_ok = true;  // a leading '{' belongs to the type
    bool arrow_ok = false; // '=>' continues only after a parameter list ')'
    for (; i < toks_.size(); ++i) {
      const js::Token& t = tok(i);
      if (t.kind == js::TokKind::Punct) {
        const std::string& p = t.text;
        if (p == "(" || p == "[") { ++depth; any = true; arrow_ok = false; continue; }
        if (p == "<") { ++depth; any = true; brace_ok = false; arrow_ok = false; continue; }
        if (int n = closes(t); n > 0) {
          if (depth - n < 0) return i;
          depth -= n; any = true; brace_ok = false; arrow_ok = false;
          continue;
        }
        if (p == ")" || p == "]") {
          if (depth == 0) return i;
          --depth; any = true; brace_ok = false;
          arrow_ok = p == ")" && depth == 0;
          continue;
        }
        if (p == "{") {
          if (depth == 0 && !brace_ok) return i;
          ++depth; any = true; arrow_ok = false;
          continue;
        }
        if (p == "}") {
          if (depth == 0) return i;
          --depth; any = true; brace_ok = false; arrow_ok = false;
          continue;
        }
        if (depth > 0) { any = true; continue; }
        if (p == "|" || p == "&" || p == "." || p == "?") {
          any = true; brace_ok = false; arrow_ok = false;
          continue;
        }
        if (p == "=>") {
          // function type; a bare '=>' after a type name starts a value arrow
          if (arrow_ok) { brace_ok = true; arrow_ok = false; continue; }
          return i;
        }
        return i;
      }
      if (t.kind == js::TokKind::Word) {
        if (t.text == "extends" || t.text == "keyof" || t.text == "typeof" ||
            t.text == "readonly" || t.text == "infer" || t.text == "new" ||
            t.text == "in" || t.text == "is" || t.text == "asserts" ||
            t.text == "void" || t.text == "this" ||
            !detail_ts::is_reserved_js(t.text)) {
          any = true; brace_ok = false; arrow_ok = false;
          continue;
        }
        return i;
      }
      if (t.kind == js::TokKind::String || t.kind == js::TokKind::Number ||
          t.kind == js::TokKind::TemplateNoSub) {
        any = true; brace_ok = false; arrow_ok = false;
        continue;
      }
      return i;
    }
    return i;
  }

  // Blanks ':' + type at `colon`; also blanks an optional '?' just before it.
  size_t blank_annotation(size_t colon) {
    if (colon > 0 && punct(colon - 1, "?")) blank(colon - 1);
    size_t end = skip_type(colon + 1);
    blank_range(colon, end);
    return end;
  }

  // Parameter list: blank modifiers, '?' markers and ': type' annotations.
  void strip_param_list(size_t open) {
    size_t close = skip_parens(open);
    for (size_t i = open + 1; i + 1 < close; ++i) {
      const js::Token& t = tok(i);
      if (t.is_word("public") || t.is_word("private") || t.is_word("protected") ||
          t.is_word("readonly")) {
        if (tok(i + 1).kind == js::TokKind::Word) blank(i);
        continue;
      }
      if (t.is_punct("?") && punct(i + 1, ":")) continue; // handled with ':'
      if (t.is_punct("?") && (punct(i + 1, ",") || punct(i + 1, ")"))) {
        blank(i);
        continue;
      }
      if (t.is_punct(":")) i = blank_annotation(i) - 1;
      else if (t.is_punct("(")) i = skip_parens(i) - 1; // nested arrow default
    }
  }

  // Return-type annotation after a parameter list close, if present.
  void strip_return_type(size_t after_close) {
    if (punct(after_close, ":")) blank_annotation(after_close);
  }

  size_t handle(size_t i) {
    const js::Token& t = tok(i);

    if (t.kind == js::TokKind::Word && statement_start(i)) {
      // export interface X {...} / export type X = ...;
      if (t.text == "interface" && tok(i + 1).kind == js::TokKind::Word) {
        size_t j = i + 1;
        while (j < toks_.size() && !punct(j, "{")) ++j;
        size_t end = punct(j, "{") ? skip_braces(j) : j;
        size_t from = (i > 0 && word(i - 1, "export")) ? i - 1 : i;
        blank_range(from, end);
        return end;
      }
      if (t.text == "type" && tok(i + 1).kind == js::TokKind::Word &&
          (punct(i + 2, "=") || punct(i + 2, "<"))) {
        size_t j = i;
        int depth = 0;
        while (j < toks_.size()) {
          if (punct(j, "{") || punct(j, "(") || punct(j, "[")) ++depth;
          else if (punct(j, "}") || punct(j, ")") || punct(j, "]")) --depth;
          else if (punct(j, ";") && depth == 0) { ++j; break; }
          ++j;
        }
        size_t from = (i > 0 && word(i - 1, "export")) ? i - 1 : i;
        blank_range(from, j);
        return j;
      }
      if (t.text == "declare") {
        size_t j = i + 1;
        int depth = 0;
        bool saw_brace = false;
        while (j < toks_.size()) {
          if (punct(j, "{")) { ++depth; saw_brace = true; }
          else if (punct(j, "}")) {
            if (--depth == 0 && saw_brace) { ++j; break; }
          } else if (punct(j, ";") && depth == 0) { ++j; break; }
          ++j;
        }
        size_t from = (i > 0 && word(i - 1, "export")) ? i - 1 : i;
        blank_range(from, j);
        return j;
      }
      if (t.text == "enum" || (t.text == "const" && word(i + 1, "enum"))) {
        size_t name = t.text == "enum" ? i + 1 : i + 2;
        if (tok(name).kind == js::TokKind::Word && punct(name + 1, "{")) {
          size_t end = skip_braces(name + 1);
          size_t from = (i > 0 && word(i - 1, "export")) ? i - 1 : i;
          blank_range(from, end);
          return end;
        }
      }
      if (t.text == "abstract" && word(i + 1, "class")) {
        blank(i);
        return i + 1;
      }
    }

    // implements A, B (up to the class body brace)
    if (t.is_word("implements") && in_class_range_header(i)) {
      size_t j = i;
      while (j < toks_.size() && !punct(j, "{")) ++j;
      blank_range(i, j);
      return j;
    }

    // function name<T>(params): R   |   method<T>(params): R in class bodies
    if (t.is_word("function")) {
      size_t j = i + 1;
      if (tok(j).kind == js::TokKind::Word) ++j;
      if (punct(j, "<")) {
        size_t end = skip_generics(j);
        blank_range(j, end);
        j = end;
      }
      if (punct(j, "(")) {
        size_t close = skip_parens(j);
        strip_param_list(j);
        strip_return_type(close);
      }
      return i + 1;
    }

    if (t.is_word("class") && tok(i + 1).kind == js::TokKind::Word &&
        punct(i + 2, "<")) {
      size_t end = skip_generics(i + 2);
      blank_range(i + 2, end);
      return end;
    }

    // Class member: modifiers, field annotations, method signatures.
    if (in_class_body(i) && t.kind == js::TokKind::Word &&
        (t.text == "public" || t.text == "private" || t.text == "protected" ||
         t.text == "readonly" || t.text == "abstract" || t.text == "override")) {
      const js::Token& n = tok(i + 1);
      if (n.kind == js::TokKind::Word || n.is_punct("[")) {
        blank(i);
        return i + 1;
      }
    }
    if (in_class_body(i) && t.kind == js::TokKind::Word) {
      // field:  name?: T = init;   or  name!: T;
      size_t j = i + 1;
      if (punct(j, "?") || punct(j, "!")) {
        if (punct(j + 1, ":") || punct(j + 1, "=") || punct(j + 1, ";")) blank(j);
        ++j;
      }
      if (punct(j, ":") && !punct(i + 1, "(")) {
        blank_annotation(j);
        return j + 1;
      }
      // method: name(params): R
      if (punct(j, "(")) {
        size_t close = skip_parens(j);
        strip_param_list(j);
        strip_return_type(close);
        return j + 1;
      }
    }

    // Arrow parameter lists: (a: T, b?: U): R =>
    if (t.is_punct("(")) {
      size_t close = skip_parens(i);
      size_t after = close;
      if (punct(after, ":")) {
        size_t end = skip_type(after + 1);
        if (punct(end, "=>")) {
          strip_param_list(i);
          blank_range(after, end);
          return close;
        }
      }
      if (punct(after, "=>")) {
        strip_param_list(i);
        return close;
      }
      return i + 1;
    }

    // let x: T = ... / const y: T;
    if ((t.is_word("var") || t.is_word("let") || t.is_word("const")) &&
        tok(i + 1).kind == js::TokKind::Word) {
      size_t j = i + 2;
      if (punct(j, "!")) { blank(j); ++j; }
      if (punct(j, ":")) blank_annotation(j);
      return i + 1;
    }

    // expr as Type  (not inside import/export braces, where "as" renames)
    if (t.is_word("as") && i > 0 && !inside_import(i)) {
      const js::Token& p = tok(i - 1);
      bool operand = p.kind == js::TokKind::Number || p.kind == js::TokKind::String ||
                     p.kind == js::TokKind::TemplateNoSub ||
                     p.kind == js::TokKind::TemplateTail ||
                     (p.kind == js::TokKind::Word && !detail_ts::is_reserved_js(p.text)) ||
                     p.is_word("this") || p.is_punct(")") || p.is_punct("]");
      if (operand) {
        size_t end = skip_type(i + 1);
        blank_range(i, end);
        return end;
      }
    }

    // non-null assertion in member chains: x!.y / x!()
    if (t.is_punct("!") && i > 0) {
      const js::Token& p = tok(i - 1);
      bool operand = (p.kind == js::TokKind::Word && !detail_ts::is_reserved_js(p.text)) ||
                     p.is_punct(")") || p.is_punct("]");
      if (operand && (punct(i + 1, ".") || punct(i + 1, "(") || punct(i + 1, ";") ||
                      punct(i + 1, ")")))
        blank(i);
      return i + 1;
    }

    return i + 1;
  }

  // True when token i sits between a "class" keyword and its body brace.
  bool in_class_range_header(size_t i) const {
    for (size_t j = i; j-- > 0;) {
      if (word(j, "class")) return true;
      if (punct(j, "{") || punct(j, "}") || punct(j, ";")) return false;
    }
    return false;
  }

  bool inside_import(size_t i) const {
    for (size_t j = i; j-- > 0;) {
      if (word(j, "import") || word(j, "export")) return true;
      if (punct(j, ";") || punct(j, "}")) return false;
    }
    return false;
  }
};

// Strips TypeScript type syntax from `source`, preserving every line break and
// the byte positions of all remaining JavaScript tokens.
inline std::string strip_types(std::string_view source) {
  return TsStripper(source).strip();
}

} // namespace redflow
