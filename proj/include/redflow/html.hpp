#pragma once

// Extraction of executable script regions from node specification HTML.
// Node definition markup keeps registration code in <script> elements typed
// as JavaScript; template and help bodies use other type attributes and are
// skipped. Positions are absolute within the original file so diagnostics
// and endpoint lines survive the extraction.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace redflow {

struct ScriptRegion {
  std::string text;      // script body, verbatim
  int line = 1;          // 1-based line of the first body character
  std::string type;      // normalized type attribute, "" when absent
};

namespace detail_html {

inline char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline bool iequal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (lower(a[i]) != lower(b[i])) return false;
  return true;
}

// Case-insensitive search for `needle` in `hay` starting at `from`.
inline size_t ifind(std::string_view hay, std::string_view needle, size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (size_t i = from; i + needle.size() <= hay.size(); ++i) {
    size_t j = 0;
    while (j < needle.size() && lower(hay[i + j]) == lower(needle[j])) ++j;
    if (j == needle.size()) return i;
  }
  return std::string_view::npos;
}

inline int count_lines(std::string_view text, size_t upto) {
  int n = 0;
  for (size_t i = 0; i < upto && i < text.size(); ++i)
    if (text[i] == '\n') ++n;
  return n;
}

// Reads the value of the type attribute out of raw tag text (the bytes
// between "<script" and ">"). Quoted and bare values are both accepted.
inline std::string type_attr(std::string_view tag) {
  size_t i = 0;
  while (i < tag.size()) {
    while (i < tag.size() && (std::isspace(static_cast<unsigned char>(tag[i])) || tag[i] == '/')) ++i;
    size_t name_start = i;
    while (i < tag.size() && tag[i] != '=' && tag[i] != '>' &&
           !std::isspace(static_cast<unsigned char>(tag[i])))
      ++i;
    std::string_view name = tag.substr(name_start, i - name_start);
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    std::string value;
    if (i < tag.size() && tag[i] == '=') {
      ++i;
      while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
      if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
        char q = tag[i++];
        size_t vs = i;
        while (i < tag.size() && tag[i] != q) ++i;
        value.assign(tag.substr(vs, i - vs));
        if (i < tag.size()) ++i;
      } else {
        size_t vs = i;
        while (i < tag.size() && tag[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(tag[i])))
          ++i;
        value.assign(tag.substr(vs, i - vs));
      }
    }
    if (iequal(name, "type")) {
      for (char& c : value) c = lower(c);
      return value;
    }
    if (name.empty()) break;
  }
  return "";
}

} // namespace detail_html

inline bool is_javascript_type(std::string_view type) {
  return type.empty() || detail_html::iequal(type, "text/javascript") ||
         detail_html::iequal(type, "application/javascript") ||
         detail_html::iequal(type, "module");
}

// Returns every script region in document order. Non-JavaScript regions are
// included (callers filter on is_javascript_type) so inventories can report
// template and help sections too.
inline std::vector<ScriptRegion> extract_scripts(std::string_view html) {
  std::vector<ScriptRegion> out;
  size_t pos = 0;
  for (;;) {
    size_t open = detail_html::ifind(html, "<script", pos);
    if (open == std::string_view::npos) break;
    // reject <scriptsomething>
    size_t after = open + 7;
    if (after < html.size() && !std::isspace(static_cast<unsigned char>(html[after])) &&
        html[after] != '>' && html[after] != '/') {
      pos = after;
      continue;
    }
    size_t tag_end = html.find('>', after);
    if (tag_end == std::string_view::npos) break;
    std::string type = detail_html::type_attr(html.substr(after, tag_end - after));
    size_t body = tag_end + 1;
    size_t close = detail_html::ifind(html, "</script", body);
    size_t body_end = close == std::string_view::npos ? html.size() : close;

    ScriptRegion region;
    region.text.assign(html.substr(body, body_end - body));
    region.line = 1 + detail_html::count_lines(html, body);
    region.type = std::move(type);
    out.push_back(std::move(region));

    if (close == std::string_view::npos) break;
    pos = html.find('>', close);
    if (pos == std::string_view::npos) break;
    ++pos;
  }
  return out;
}

inline std::vector<ScriptRegion> extract_js_scripts(std::string_view html) {
  std::vector<ScriptRegion> all = extract_scripts(html);
  std::vector<ScriptRegion> out;
  for (auto& r : all)
    if (is_javascript_type(r.type)) out.push_back(std::move(r));
  return out;
}

} // namespace redflow
