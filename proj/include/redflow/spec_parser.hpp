#pragma once

// Declared-port extraction from node specification HTML. Registrations are
// located syntactically: a registerType call whose first argument names the
// node type and whose second argument is the configuration object. The object
// is captured by balanced-brace matching over lexer tokens, so strings,
// comments, templates, and embedded functions never confuse the capture.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redflow/diag.hpp"
#include "redflow/html.hpp"
#include "redflow/js/lexer.hpp"

namespace redflow {

struct RawRegistration {
  std::string node_name;
  std::string properties_text; // verbatim config object source, "" if unresolved
  std::string file;
  int line = 0; // line of the registerType call
};

struct NodeSpec {
  std::string node_name;
  int inputs = 0;
  int outputs = 0;
  bool parsable = true;
  std::string file;
  int line = 0;
};

struct SpecTotals {
  int s_in = 0;
  int s_out = 0;
  int unparsable_nodes = 0;
};

namespace detail_spec {

inline bool brace_open(const js::Token& t) {
  return t.is_punct("{") || t.is_punct("(") || t.is_punct("[");
}
inline bool brace_close(const js::Token& t) {
  return t.is_punct("}") || t.is_punct(")") || t.is_punct("]");
}

// Captures the balanced source text starting at an opening "{" token.
inline std::optional<std::string> capture_object(const std::vector<js::Token>& toks,
                                                 size_t open, std::string_view src) {
  int depth = 0;
  for (size_t i = open; i < toks.size(); ++i) {
    if (brace_open(toks[i])) ++depth;
    else if (brace_close(toks[i])) {
      if (--depth == 0)
        return std::string(src.substr(toks[open].begin, toks[i].end - toks[open].begin));
    }
  }
  return std::nullopt;
}

// Resolves an identifier second argument against a prior `name = { ... }`
// assignment in the same script region (a common registration style).
inline std::optional<std::string> resolve_ident_object(const std::vector<js::Token>& toks,
                                                       const std::string& name,
                                                       std::string_view src) {
  for (size_t i = 0; i + 2 < toks.size(); ++i) {
    if (toks[i].kind == js::TokKind::Word && toks[i].text == name &&
        toks[i + 1].is_punct("=") && toks[i + 2].is_punct("{"))
      return capture_object(toks, i + 2, src);
  }
  return std::nullopt;
}

} // namespace detail_spec

// Finds every registration in the JavaScript script regions of `html_text`,
// in document order. Unresolvable registrations keep an empty properties_text
// and produce a warning.
inline std::vector<RawRegistration> extract_registrations(
    std::string_view html_text, const std::string& file,
    std::vector<Diagnostic>* warnings = nullptr) {
  std::vector<RawRegistration> out;
  for (const ScriptRegion& region : extract_js_scripts(html_text)) {
    js::Lexer lex(region.text, file, region.line - 1);
    std::vector<js::Token> toks = lex.tokenize();
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
      if (!toks[i].is_word("registerType") || !toks[i + 1].is_punct("(")) continue;
      size_t j = i + 2;
      RawRegistration reg;
      reg.file = file;
      reg.line = toks[i].line;
      if (j < toks.size() && toks[j].kind == js::TokKind::String)
        reg.node_name = toks[j].text;
      else if (j < toks.size() && toks[j].kind == js::TokKind::Word)
        reg.node_name = toks[j].text;
      else {
        if (warnings)
          warnings->push_back(make_warning(file, toks[i].line,
                                           "registration without a node type name"));
        continue;
      }
      ++j;
      if (j < toks.size() && toks[j].is_punct(",")) ++j;
      std::optional<std::string> props;
      if (j < toks.size() && toks[j].is_punct("{"))
        props = detail_spec::capture_object(toks, j, region.text);
      else if (j < toks.size() && toks[j].kind == js::TokKind::Word)
        props = detail_spec::resolve_ident_object(toks, toks[j].text, region.text);
      if (props)
        reg.properties_text = std::move(*props);
      else if (warnings)
        warnings->push_back(make_warning(
            file, toks[i].line,
            "could not capture configuration object for node '" + reg.node_name + "'"));
      out.push_back(std::move(reg));
    }
  }
  return out;
}

// Reads the inputs/outputs counts out of a captured registration object.
// Only top-level keys count; nested objects (defaults, functions) are opaque.
// A key bound to anything but a bare non-negative decimal integer literal
// makes the spec unparsable.
inline NodeSpec parse_port_counts(const RawRegistration& reg,
                                  std::vector<Diagnostic>* warnings = nullptr) {
  NodeSpec spec;
  spec.node_name = reg.node_name;
  spec.file = reg.file;
  spec.line = reg.line;

  if (reg.properties_text.empty()) {
    spec.parsable = false;
    return spec;
  }

  js::Lexer lex(reg.properties_text, reg.file, reg.line - 1);
  std::vector<js::Token> toks = lex.tokenize();

  std::optional<int> inputs, outputs;
  bool bad_value = false;
  int depth = 0;
  for (size_t i = 0; i < toks.size(); ++i) {
    const js::Token& t = toks[i];
    if (detail_spec::brace_open(t)) { ++depth; continue; }
    if (detail_spec::brace_close(t)) { --depth; continue; }
    if (depth != 1) continue;
    bool is_key = (t.kind == js::TokKind::Word || t.kind == js::TokKind::String) &&
                  i + 1 < toks.size() && toks[i + 1].is_punct(":");
    if (!is_key) continue;
    if (t.text != "inputs" && t.text != "outputs") continue;

    // value token run: up to ',' or '}' at this depth
    size_t v = i + 2;
    size_t vend = v;
    int vdepth = 0;
    while (vend < toks.size()) {
      const js::Token& u = toks[vend];
      if (detail_spec::brace_open(u)) ++vdepth;
      else if (detail_spec::brace_close(u)) {
        if (vdepth == 0) break;
        --vdepth;
      } else if (u.is_punct(",") && vdepth == 0)
        break;
      ++vend;
    }
    std::optional<int> value;
    if (vend == v + 1 && toks[v].kind == js::TokKind::Number) {
      const std::string& text = toks[v].text;
      bool digits = !text.empty();
      for (char c : text)
        if (c < '0' || c > '9') digits = false;
      if (digits && text.size() <= 9) value = std::stoi(text);
    }
    if (!value) bad_value = true;
    else if (t.text == "inputs") inputs = value;
    else outputs = value;
    i = vend - 1;
  }

  if (bad_value) {
    spec.parsable = false;
    return spec;
  }
  if (inputs) {
    spec.inputs = *inputs;
    if (spec.inputs > 1) {
      if (warnings)
        warnings->push_back(make_warning(reg.file, reg.line,
                                         "node '" + reg.node_name +
                                             "' declares inputs > 1; clamped to 1"));
      spec.inputs = 1;
    }
  } else if (warnings) {
    warnings->push_back(make_warning(reg.file, reg.line,
                                     "node '" + reg.node_name +
                                         "' omits inputs; defaulting to 0"));
  }
  if (outputs) {
    spec.outputs = *outputs;
  } else if (warnings) {
    warnings->push_back(make_warning(reg.file, reg.line,
                                     "node '" + reg.node_name +
                                         "' omits outputs; defaulting to 0"));
  }
  return spec;
}

// Package-level sums over parsable specs.
inline SpecTotals spec_totals(const std::vector<NodeSpec>& specs) {
  SpecTotals t;
  for (const NodeSpec& s : specs) {
    if (!s.parsable) {
      ++t.unparsable_nodes;
      continue;
    }
    t.s_in += s.inputs;
    t.s_out += s.outputs;
  }
  return t;
}

} // namespace redflow
