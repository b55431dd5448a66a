#pragma once

// Source/sink catalog: the machine-readable rule set that drives endpoint
// matching. A catalog is immutable after load and shared read-only by all
// analyzer workers. The default catalog ships embedded; --catalog overrides.

#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redflow/diag.hpp"

namespace redflow {

enum class EndpointKind { Source, Sink };

enum class SourceKind { CallbackParameter, ReturnValue, PropertyRead, NamePattern };

enum class SinkCategory {
  OtherNode,
  Terminal,
  Dashboard,
  Log,
  File,
  ExternalServer,
  Framework,
  Hardware,
};

enum class DataClass { Sensitive, ErrorMessage, InputMessage, Misc };

enum class ReceiverRole { Any, NodeObject, FrameworkObject, RequiredModule };

inline std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::CallbackParameter: return "callback-parameter";
    case SourceKind::ReturnValue: return "return-value";
    case SourceKind::PropertyRead: return "property-read";
    case SourceKind::NamePattern: return "name-pattern";
  }
  return "?";
}

inline std::string to_string(SinkCategory c) {
  switch (c) {
    case SinkCategory::OtherNode: return "other-node";
    case SinkCategory::Terminal: return "terminal";
    case SinkCategory::Dashboard: return "dashboard";
    case SinkCategory::Log: return "log";
    case SinkCategory::File: return "file";
    case SinkCategory::ExternalServer: return "external-server";
    case SinkCategory::Framework: return "framework";
    case SinkCategory::Hardware: return "hardware";
  }
  return "?";
}

inline std::string to_string(DataClass d) {
  switch (d) {
    case DataClass::Sensitive: return "sensitive-information";
    case DataClass::ErrorMessage: return "error-message";
    case DataClass::InputMessage: return "input-message";
    case DataClass::Misc: return "misc";
  }
  return "?";
}

inline const std::vector<SinkCategory>& all_sink_categories() {
  static const std::vector<SinkCategory> all = {
      SinkCategory::OtherNode, SinkCategory::Terminal,  SinkCategory::Dashboard,
      SinkCategory::Log,       SinkCategory::File,      SinkCategory::ExternalServer,
      SinkCategory::Framework, SinkCategory::Hardware};
  return all;
}

inline const std::vector<DataClass>& all_data_classes() {
  static const std::vector<DataClass> all = {DataClass::Sensitive, DataClass::ErrorMessage,
                                             DataClass::InputMessage, DataClass::Misc};
  return all;
}

inline std::optional<SourceKind> source_kind_from(const std::string& s) {
  if (s == "callback-parameter") return SourceKind::CallbackParameter;
  if (s == "return-value") return SourceKind::ReturnValue;
  if (s == "property-read") return SourceKind::PropertyRead;
  if (s == "name-pattern") return SourceKind::NamePattern;
  return std::nullopt;
}

inline std::optional<SinkCategory> sink_category_from(const std::string& s) {
  for (SinkCategory c : all_sink_categories())
    if (to_string(c) == s) return c;
  return std::nullopt;
}

inline std::optional<DataClass> data_class_from(const std::string& s) {
  for (DataClass d : all_data_classes())
    if (to_string(d) == s) return d;
  return std::nullopt;
}

struct MatchPattern {
  std::vector<std::string> callee_path;     // per-segment, "*" wildcards a segment
  ReceiverRole receiver_role = ReceiverRole::Any;
  std::string required_module;              // set when role is RequiredModule
  std::map<int, std::string> literal_args;  // arg index -> required string literal
  std::string name_regex;                   // name-pattern sources only
  std::string param_name_pattern;           // callback-parameter: seed only matching params
};

struct CatalogEntry {
  std::string id;
  EndpointKind kind = EndpointKind::Source;
  MatchPattern match;
  SourceKind source_kind = SourceKind::CallbackParameter; // sources
  int callback_arg = -1; // callback-parameter: argument index, -1 = any function argument
  std::vector<int> taint_positions; // sinks; empty = any position
  SinkCategory sink_category = SinkCategory::OtherNode;   // sinks
  std::optional<DataClass> data_class_hint;
};

struct Catalog {
  std::string version;
  std::vector<CatalogEntry> entries;

  const CatalogEntry* find(const std::string& id) const {
    for (const CatalogEntry& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }
};

struct CatalogError : std::runtime_error {
  std::vector<Diagnostic> details;
  explicit CatalogError(const std::string& what, std::vector<Diagnostic> d = {})
      : std::runtime_error(what), details(std::move(d)) {}
};

namespace detail_catalog {

inline std::vector<std::string> split_path(const std::string& dotted) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : dotted) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else
      cur.push_back(c);
  }
  out.push_back(cur);
  return out;
}

inline std::string join_path(const std::vector<std::string>& segs) {
  std::string out;
  for (size_t i = 0; i < segs.size(); ++i) {
    if (i) out.push_back('.');
    out += segs[i];
  }
  return out;
}

} // namespace detail_catalog

// Parses and validates catalog JSON. Throws CatalogError with entry-level
// diagnostics on schema violations.
inline Catalog parse_catalog(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError("catalog " + origin + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
    throw CatalogError("catalog " + origin + " must be an object with an entries array");

  Catalog cat;
  cat.version = doc.value("version", "unversioned");
  std::vector<Diagnostic> problems;
  std::set<std::string> seen_ids;
  int index = 0;
  for (const nlohmann::json& j : doc["entries"]) {
    ++index;
    auto bad = [&](const std::string& msg) {
      problems.push_back(make_error(origin, index, "entry " + std::to_string(index) + ": " + msg));
    };
    if (!j.is_object()) {
      bad("not an object");
      continue;
    }
    CatalogEntry e;
    e.id = j.value("id", "");
    if (e.id.empty()) {
      bad("missing id");
      continue;
    }
    if (!seen_ids.insert(e.id).second) {
      bad("duplicate id '" + e.id + "'");
      continue;
    }
    std::string kind = j.value("kind", "");
    if (kind == "source")
      e.kind = EndpointKind::Source;
    else if (kind == "sink")
      e.kind = EndpointKind::Sink;
    else {
      bad("id '" + e.id + "': kind must be source or sink");
      continue;
    }
    std::string path = j.value("callee_path", "");
    if (!path.empty()) e.match.callee_path = detail_catalog::split_path(path);
    std::string role = j.value("receiver_role", "any");
    if (role == "any")
      e.match.receiver_role = ReceiverRole::Any;
    else if (role == "node-object")
      e.match.receiver_role = ReceiverRole::NodeObject;
    else if (role == "framework-object")
      e.match.receiver_role = ReceiverRole::FrameworkObject;
    else if (role.rfind("required-module:", 0) == 0) {
      e.match.receiver_role = ReceiverRole::RequiredModule;
      e.match.required_module = role.substr(16);
      if (e.match.required_module.empty()) {
        bad("id '" + e.id + "': required-module role needs a module name");
        continue;
      }
    } else {
      bad("id '" + e.id + "': unknown receiver_role '" + role + "'");
      continue;
    }
    if (j.contains("literal_args")) {
      for (auto& [k, v] : j["literal_args"].items())
        e.match.literal_args[std::stoi(k)] = v.get<std::string>();
    }
    e.match.name_regex = j.value("name_regex", "");
    e.match.param_name_pattern = j.value("param_name_pattern", "");

    if (e.kind == EndpointKind::Source) {
      auto sk = source_kind_from(j.value("source_kind", ""));
      if (!sk) {
        bad("id '" + e.id + "': source entries need a valid source_kind");
        continue;
      }
      e.source_kind = *sk;
      e.callback_arg = j.value("callback_arg", -1);
      if (e.source_kind == SourceKind::NamePattern && e.match.name_regex.empty()) {
        bad("id '" + e.id + "': name-pattern entries need name_regex");
        continue;
      }
      if (e.source_kind != SourceKind::NamePattern && e.match.callee_path.empty()) {
        bad("id '" + e.id + "': source entries need callee_path");
        continue;
      }
    } else {
      auto sc = sink_category_from(j.value("sink_category", ""));
      if (!sc) {
        bad("id '" + e.id + "': sink entries need a valid sink_category");
        continue;
      }
      e.sink_category = *sc;
      if (e.match.callee_path.empty()) {
        bad("id '" + e.id + "': sink entries need callee_path");
        continue;
      }
      if (j.contains("taint_positions") && !j["taint_positions"].is_string())
        for (const auto& p : j["taint_positions"]) e.taint_positions.push_back(p.get<int>());
    }
    if (j.contains("data_class")) {
      auto dc = data_class_from(j["data_class"].get<std::string>());
      if (!dc) {
        bad("id '" + e.id + "': unknown data_class");
        continue;
      }
      e.data_class_hint = dc;
    }
    if (!e.match.name_regex.empty()) {
      try {
        std::regex probe(e.match.name_regex, std::regex::icase);
      } catch (const std::regex_error&) {
        bad("id '" + e.id + "': name_regex does not compile");
        continue;
      }
    }
    cat.entries.push_back(std::move(e));
  }
  if (!problems.empty()) {
    std::string summary = "catalog " + origin + " has " + std::to_string(problems.size()) +
                          " invalid entr" + (problems.size() == 1 ? "y" : "ies") + ": " +
                          problems.front().message;
    throw CatalogError(summary, std::move(problems));
  }
  if (cat.entries.empty())
    throw CatalogError("catalog " + origin + " has no entries");
  return cat;
}

inline Catalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CatalogError("cannot open catalog file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str(), path);
}

// The shipped rule set. Sources cover listener/event callbacks, error
// parameters, credentials/environment/context reads, and sensitive naming;
// sinks cover message sends, log/dashboard/terminal output, file writes,
// network clients, framework context writes, and hardware port writes.
// Module-gated entries precede textual fallbacks so the most specific rule
// wins when several patterns cover one call.
inline const char* default_catalog_text() {
  return R"CATALOG({
  "version": "default-1",
  "entries": [
    {"id": "listener-input", "kind": "source", "source_kind": "callback-parameter",
     "callee_path": "node.on", "receiver_role": "node-object",
     "literal_args": {"0": "input"}, "callback_arg": 1, "data_class": "input-message"},
    {"id": "ws-message", "kind": "source", "source_kind": "callback-parameter",
     "callee_path": "*.on", "literal_args": {"0": "message"},
     "callback_arg": 1, "data_class": "input-message"},
    {"id": "catch-param", "kind": "source", "source_kind": "callback-parameter",
     "callee_path": "catch", "data_class": "error-message"},
    {"id": "err-callback-param", "kind": "source", "source_kind": "callback-parameter",
     "callee_path": "*", "param_name_pattern": "^(err|error)$",
     "data_class": "error-message"},
    {"id": "credentials-read", "kind": "source", "source_kind": "property-read",
     "callee_path": "node.credentials", "receiver_role": "node-object",
     "data_class": "sensitive-information"},
    {"id": "env-read", "kind": "source", "source_kind": "property-read",
     "callee_path": "process.env", "data_class": "sensitive-information"},
    {"id": "sensitive-name", "kind": "source", "source_kind": "name-pattern",
     "name_regex": "password|passwd|secret|token|api[_-]?key|credential|private[_-]?key",
     "data_class": "sensitive-information"},
    {"id": "fs-read-sync", "kind": "source", "source_kind": "return-value",
     "callee_path": "fs.readFileSync", "receiver_role": "required-module:fs"},
    {"id": "red-util-get", "kind": "source", "source_kind": "return-value",
     "callee_path": "RED.util.getMessageProperty", "receiver_role": "framework-object",
     "data_class": "input-message"},
    {"id": "context-get", "kind": "source", "source_kind": "return-value",
     "callee_path": "context.get"},
    {"id": "flow-get", "kind": "source", "source_kind": "return-value",
     "callee_path": "flow.get"},
    {"id": "global-get", "kind": "source", "source_kind": "return-value",
     "callee_path": "global.get"},

    {"id": "node-send", "kind": "sink", "callee_path": "node.send",
     "receiver_role": "node-object", "taint_positions": [0],
     "sink_category": "other-node"},
    {"id": "bare-send", "kind": "sink", "callee_path": "send",
     "taint_positions": [0], "sink_category": "other-node"},
    {"id": "node-log", "kind": "sink", "callee_path": "node.log",
     "receiver_role": "node-object", "sink_category": "log"},
    {"id": "red-log", "kind": "sink", "callee_path": "RED.log.*",
     "receiver_role": "framework-object", "sink_category": "log"},
    {"id": "node-warn", "kind": "sink", "callee_path": "node.warn",
     "receiver_role": "node-object", "sink_category": "dashboard"},
    {"id": "node-error", "kind": "sink", "callee_path": "node.error",
     "receiver_role": "node-object", "sink_category": "dashboard"},
    {"id": "node-status", "kind": "sink", "callee_path": "node.status",
     "receiver_role": "node-object", "sink_category": "dashboard"},
    {"id": "console-write", "kind": "sink", "callee_path": "console.*",
     "sink_category": "terminal"},
    {"id": "stdout-write", "kind": "sink", "callee_path": "process.stdout.write",
     "sink_category": "terminal"},
    {"id": "stderr-write", "kind": "sink", "callee_path": "process.stderr.write",
     "sink_category": "terminal"},
    {"id": "fs-write-file", "kind": "sink", "callee_path": "fs.writeFile",
     "receiver_role": "required-module:fs", "taint_positions": [1],
     "sink_category": "file"},
    {"id": "fs-write-file-sync", "kind": "sink", "callee_path": "fs.writeFileSync",
     "receiver_role": "required-module:fs", "taint_positions": [1],
     "sink_category": "file"},
    {"id": "fs-append-file", "kind": "sink", "callee_path": "fs.appendFile",
     "receiver_role": "required-module:fs", "taint_positions": [1],
     "sink_category": "file"},
    {"id": "fs-append-file-sync", "kind": "sink", "callee_path": "fs.appendFileSync",
     "receiver_role": "required-module:fs", "taint_positions": [1],
     "sink_category": "file"},
    {"id": "http-request", "kind": "sink", "callee_path": "http.request",
     "receiver_role": "required-module:http", "sink_category": "external-server"},
    {"id": "https-request", "kind": "sink", "callee_path": "https.request",
     "receiver_role": "required-module:https", "sink_category": "external-server"},
    {"id": "http-get", "kind": "sink", "callee_path": "http.get",
     "receiver_role": "required-module:http", "sink_category": "external-server"},
    {"id": "https-get", "kind": "sink", "callee_path": "https.get",
     "receiver_role": "required-module:https", "sink_category": "external-server"},
    {"id": "fetch-call", "kind": "sink", "callee_path": "fetch",
     "sink_category": "external-server"},
    {"id": "axios-call", "kind": "sink", "callee_path": "axios.*",
     "receiver_role": "required-module:axios", "sink_category": "external-server"},
    {"id": "request-lib", "kind": "sink", "callee_path": "request",
     "receiver_role": "required-module:request", "sink_category": "external-server"},
    {"id": "net-connect", "kind": "sink", "callee_path": "net.connect",
     "receiver_role": "required-module:net", "sink_category": "external-server"},
    {"id": "context-set", "kind": "sink", "callee_path": "context.set",
     "taint_positions": [1], "sink_category": "framework"},
    {"id": "flow-set", "kind": "sink", "callee_path": "flow.set",
     "taint_positions": [1], "sink_category": "framework"},
    {"id": "global-set", "kind": "sink", "callee_path": "global.set",
     "taint_positions": [1], "sink_category": "framework"},
    {"id": "gpio-write", "kind": "sink", "callee_path": "*.write",
     "receiver_role": "required-module:rpi-gpio", "taint_positions": [1],
     "sink_category": "hardware"},
    {"id": "serialport-write", "kind": "sink", "callee_path": "*.write",
     "receiver_role": "required-module:serialport", "taint_positions": [0],
     "sink_category": "hardware"},
    {"id": "port-write", "kind": "sink", "callee_path": "port.write",
     "taint_positions": [0], "sink_category": "hardware"}
  ]
})CATALOG";
}

inline const Catalog& default_catalog() {
  static const Catalog cat = parse_catalog(default_catalog_text(), "<builtin>");
  return cat;
}

// ---------------------------------------------------------------------------
// Matching. Contexts are produced by the analyzer's tree walk; matching is a
// pure function of (context, pattern).

struct CallContext {
  std::vector<std::string> path;  // textual callee chain, e.g. {"node","send"}
  ReceiverRole receiver = ReceiverRole::Any;  // resolved role of the chain root
  std::string required_module;    // module name when the root binds a require()
  std::vector<std::optional<std::string>> literal_args; // cooked string literal per arg
  size_t arg_count = 0;
};

struct ReadContext {
  std::vector<std::string> path;  // property chain being read
  ReceiverRole receiver = ReceiverRole::Any;
  std::string required_module;
};

namespace detail_catalog {

inline bool segment_matches(const std::string& pat, const std::string& seg) {
  return pat == "*" || pat == seg;
}

inline bool role_matches(const MatchPattern& pat, ReceiverRole receiver,
                         const std::string& required_module) {
  switch (pat.receiver_role) {
    case ReceiverRole::Any: return true;
    case ReceiverRole::NodeObject: return receiver == ReceiverRole::NodeObject;
    case ReceiverRole::FrameworkObject: return receiver == ReceiverRole::FrameworkObject;
    case ReceiverRole::RequiredModule: return required_module == pat.required_module;
  }
  return false;
}

// Calls need the full chain; property reads may match a prefix of the read.
inline bool path_matches(const MatchPattern& pat, const std::vector<std::string>& path,
                         ReceiverRole receiver, const std::string& required_module,
                         bool prefix) {
  const std::vector<std::string>& p = pat.callee_path;
  if (p.empty() || path.empty()) return false;
  if (prefix ? path.size() < p.size() : path.size() != p.size()) return false;
  if (!role_matches(pat, receiver, required_module)) return false;
  // a non-Any role vouches for the root segment; otherwise it must match text
  size_t first = pat.receiver_role == ReceiverRole::Any ? 0 : 1;
  for (size_t i = first; i < p.size(); ++i)
    if (!segment_matches(p[i], path[i])) return false;
  return true;
}

inline bool literal_args_match(const MatchPattern& pat, const CallContext& ctx) {
  for (const auto& [idx, want] : pat.literal_args) {
    if (idx < 0 || static_cast<size_t>(idx) >= ctx.literal_args.size()) return false;
    const auto& got = ctx.literal_args[static_cast<size_t>(idx)];
    if (!got || *got != want) return false;
  }
  return true;
}

} // namespace detail_catalog

inline bool matches_call(const MatchPattern& pat, const CallContext& ctx) {
  return detail_catalog::path_matches(pat, ctx.path, ctx.receiver, ctx.required_module,
                                      /*prefix=*/false) &&
         detail_catalog::literal_args_match(pat, ctx);
}

inline bool matches_read(const MatchPattern& pat, const ReadContext& ctx) {
  return detail_catalog::path_matches(pat, ctx.path, ctx.receiver, ctx.required_module,
                                      /*prefix=*/true);
}

// First sink entry matching the call, in catalog order.
inline const CatalogEntry* match_sink(const CallContext& ctx, const Catalog& catalog) {
  for (const CatalogEntry& e : catalog.entries) {
    if (e.kind != EndpointKind::Sink) continue;
    if (matches_call(e.match, ctx)) return &e;
  }
  return nullptr;
}

// First source entry of the requested source kind matching the call.
inline const CatalogEntry* match_call_source(const CallContext& ctx, const Catalog& catalog,
                                             SourceKind which) {
  for (const CatalogEntry& e : catalog.entries) {
    if (e.kind != EndpointKind::Source || e.source_kind != which) continue;
    if (e.match.callee_path.size() == 1 && e.match.callee_path[0] == "catch")
      continue; // catch pseudo-pattern never matches a real call
    if (!e.match.param_name_pattern.empty())
      continue; // err-callback entries go through err_param_entries instead
    if (matches_call(e.match, ctx)) return &e;
  }
  return nullptr;
}

inline const CatalogEntry* match_property_read(const ReadContext& ctx, const Catalog& catalog) {
  for (const CatalogEntry& e : catalog.entries) {
    if (e.kind != EndpointKind::Source || e.source_kind != SourceKind::PropertyRead) continue;
    if (matches_read(e.match, ctx)) return &e;
  }
  return nullptr;
}

// Name-pattern matching: identifier and property names only, case-insensitive.
inline const CatalogEntry* match_name(const std::string& name, const Catalog& catalog) {
  for (const CatalogEntry& e : catalog.entries) {
    if (e.kind != EndpointKind::Source || e.source_kind != SourceKind::NamePattern) continue;
    std::regex re(e.match.name_regex, std::regex::icase);
    if (std::regex_search(name, re)) return &e;
  }
  return nullptr;
}

// The catch-clause pseudo-entry (propagation rule for error parameters).
inline const CatalogEntry* catch_entry(const Catalog& catalog) {
  for (const CatalogEntry& e : catalog.entries) {
    if (e.kind == EndpointKind::Source && e.source_kind == SourceKind::CallbackParameter &&
        e.match.callee_path.size() == 1 && e.match.callee_path[0] == "catch")
      return &e;
  }
  return nullptr;
}

// Err-callback entries (param_name_pattern driven), for the analyzer's
// function-argument walk.
inline std::vector<const CatalogEntry*> err_param_entries(const Catalog& catalog) {
  std::vector<const CatalogEntry*> out;
  for (const CatalogEntry& e : catalog.entries)
    if (e.kind == EndpointKind::Source && e.source_kind == SourceKind::CallbackParameter &&
        !e.match.param_name_pattern.empty())
      out.push_back(&e);
  return out;
}

inline DataClass entry_data_class(const CatalogEntry& e) {
  return e.data_class_hint.value_or(DataClass::Misc);
}

} // namespace redflow
