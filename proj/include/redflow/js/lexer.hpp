#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "redflow/diag.hpp"

namespace redflow::js {

enum class TokKind {
  Word,        // identifier or keyword; parser decides by text
  Number,
  String,        // text = cooked value
  Regex,         // text = raw literal
  TemplateNoSub, // `...`
  TemplateHead,  // `...${
  TemplateMiddle,// }...${
  TemplateTail,  // }...`
  Punct,
  End,
};

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int line = 1;
  size_t begin = 0; // source offsets, for lexical rewriting passes
  size_t end = 0;

  bool is_word(std::string_view w) const { return kind == TokKind::Word && text == w; }
  bool is_punct(std::string_view p) const { return kind == TokKind::Punct && text == p; }
};

// Tokenizes a whole source buffer. Error-tolerant: malformed input yields
// diagnostics and the lexer resynchronizes instead of stopping.
class Lexer {
 public:
  Lexer(std::string_view src, std::string file, int line_offset = 0)
      : src_(src), file_(std::move(file)), line_(1 + line_offset) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool end = t.kind == TokKind::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  struct TemplateFrame { int brace_depth = 0; };

  std::string_view src_;
  std::string file_;
  size_t pos_ = 0;
  int line_;
  std::vector<TemplateFrame> templates_;
  std::vector<Diagnostic> diags_;
  // Last token relevant for the regex-vs-division decision.
  Token prev_;

  static bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
  }
  static bool is_ident_part(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  bool at_end() const { return pos_ >= src_.size(); }

  void error(int line, std::string msg) {
    diags_.push_back(make_error(file_, line, std::move(msg)));
  }

  Token make(TokKind kind, std::string text, int line) {
    Token t{kind, std::move(text), line};
    if (kind != TokKind::End) prev_ = t;
    return t;
  }

  // After these a '/' starts a division, not a regex.
  bool regex_allowed() const {
    switch (prev_.kind) {
      case TokKind::Number:
      case TokKind::String:
      case TokKind::Regex:
      case TokKind::TemplateNoSub:
      case TokKind::TemplateTail:
        return false;
      case TokKind::Word:
        if (prev_.text == "this" || prev_.text == "true" || prev_.text == "false" ||
            prev_.text == "null" || prev_.text == "super")
          return false;
        // after a plain identifier '/' is a division; after return/typeof/... a regex
        return is_reserved(prev_.text);
      case TokKind::Punct:
        if (prev_.text == ")" || prev_.text == "]" || prev_.text == "++" || prev_.text == "--")
          return false;
        return true;
      default:
        return true;
    }
  }

  static bool is_reserved(const std::string& w) {
    static const char* kws[] = {
        "var", "let", "const", "function", "return", "if", "else", "for", "while",
        "do", "break", "continue", "new", "delete", "typeof", "instanceof", "in",
        "of", "this", "null", "true", "false", "try", "catch", "finally", "throw",
        "switch", "case", "default", "class", "extends", "super", "import",
        "export", "from", "void", "yield", "await", "async", "static", "get", "set"};
    for (const char* k : kws)
      if (w == k) return true;
    return false;
  }

  void skip_trivia() {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
        continue;
      }
      if (peek() == '/' && peek(1) == '*') {
        int start_line = line_;
        advance();
        advance();
        bool closed = false;
        while (!at_end()) {
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            closed = true;
            break;
          }
          advance();
        }
        if (!closed) error(start_line, "unterminated block comment");
        continue;
      }
      break;
    }
  }

  Token next() {
    skip_trivia();
    size_t begin = pos_;
    Token t = next_core();
    t.begin = begin;
    t.end = pos_;
    return t;
  }

  Token next_core() {
    if (at_end()) return make(TokKind::End, "", line_);
    int line = line_;
    char c = peek();

    if (c == '`') {
      advance();
      return scan_template_chunk(/*head=*/true, line);
    }
    if (c == '}' && !templates_.empty() && templates_.back().brace_depth == 0) {
      advance();
      return scan_template_chunk(/*head=*/false, line);
    }
    if (is_ident_start(c)) {
      std::string w;
      while (!at_end() && is_ident_part(peek())) w.push_back(advance());
      return make(TokKind::Word, std::move(w), line);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return scan_number(line);
    }
    if (c == '\'' || c == '"') return scan_string(line);
    if (c == '/' && regex_allowed()) return scan_regex(line);
    return scan_punct(line);
  }

  Token scan_number(int line) {
    std::string text;
    while (!at_end()) {
      char c = peek();
      bool hex = text.size() > 1 && (text[1] == 'x' || text[1] == 'X');
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_') {
        text.push_back(advance());
      } else if ((c == '+' || c == '-') && !text.empty() && !hex &&
                 (text.back() == 'e' || text.back() == 'E')) {
        text.push_back(advance());
      } else {
        break;
      }
    }
    return make(TokKind::Number, std::move(text), line);
  }

  Token scan_string(int line) {
    char quote = advance();
    std::string value;
    for (;;) {
      if (at_end() || peek() == '\n') {
        error(line, "unterminated string literal");
        break;
      }
      char c = advance();
      if (c == quote) break;
      if (c == '\\') {
        if (at_end()) break;
        char e = advance();
        switch (e) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          case '\n': break; // line continuation
          default: value.push_back(e); break;
        }
        continue;
      }
      value.push_back(c);
    }
    return make(TokKind::String, std::move(value), line);
  }

  Token scan_regex(int line) {
    std::string text;
    text.push_back(advance()); // '/'
    bool in_class = false;
    for (;;) {
      if (at_end() || peek() == '\n') {
        error(line, "unterminated regular expression");
        return make(TokKind::Regex, std::move(text), line);
      }
      char c = advance();
      text.push_back(c);
      if (c == '\\') {
        if (!at_end() && peek() != '\n') text.push_back(advance());
        continue;
      }
      if (c == '[') in_class = true;
      else if (c == ']') in_class = false;
      else if (c == '/' && !in_class) break;
    }
    while (!at_end() && is_ident_part(peek())) text.push_back(advance()); // flags
    return make(TokKind::Regex, std::move(text), line);
  }

  Token scan_template_chunk(bool head, int line) {
    std::string value;
    for (;;) {
      if (at_end()) {
        error(line, "unterminated template literal");
        if (!head && !templates_.empty()) templates_.pop_back();
        return make(head ? TokKind::TemplateNoSub : TokKind::TemplateTail,
                    std::move(value), line);
      }
      char c = advance();
      if (c == '`') {
        if (!head && !templates_.empty()) templates_.pop_back();
        return make(head ? TokKind::TemplateNoSub : TokKind::TemplateTail,
                    std::move(value), line);
      }
      if (c == '\\') {
        if (!at_end()) value.push_back(advance());
        continue;
      }
      if (c == '$' && peek() == '{') {
        advance();
        if (head) templates_.push_back({});
        else if (!templates_.empty()) templates_.back().brace_depth = 0;
        return make(head ? TokKind::TemplateHead : TokKind::TemplateMiddle,
                    std::move(value), line);
      }
      value.push_back(c);
    }
  }

  Token scan_punct(int line) {
    static const char* three[] = {"===", "!==", ">>>", "**=", "<<=", ">>=", "...",
                                  "&&=", "||=", "?\?="};
    static const char* two[] = {"=>", "==", "!=", "<=", ">=", "&&", "||", "??",
                                "?.", "++", "--", "+=", "-=", "*=", "/=", "%=",
                                "&=", "|=", "^=", "<<", ">>", "**"};
    if (pos_ + 4 <= src_.size() && src_.substr(pos_, 4) == ">>>=") {
      pos_ += 4;
      return make(TokKind::Punct, ">>>=", line);
    }
    for (const char* p : three) {
      if (pos_ + 3 <= src_.size() && src_.substr(pos_, 3) == p) {
        pos_ += 3;
        return make(TokKind::Punct, p, line);
      }
    }
    for (const char* p : two) {
      if (pos_ + 2 <= src_.size() && src_.substr(pos_, 2) == p) {
        pos_ += 2;
        return make(TokKind::Punct, p, line);
      }
    }
    char c = advance();
    if (c == '{' && !templates_.empty()) templates_.back().brace_depth++;
    if (c == '}' && !templates_.empty() && templates_.back().brace_depth > 0)
      templates_.back().brace_depth--;
    return make(TokKind::Punct, std::string(1, c), line);
  }
};

} // namespace redflow::js
