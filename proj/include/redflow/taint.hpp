#pragma once

// Flow-insensitive taint propagation over the syntax tree. Sources seed
// variables or expression occurrences; whole-tree evaluation passes push
// taint through assignments, expressions, containers, and same-file calls
// until the variable state reaches a fixpoint, then one recording pass emits
// a flow for every sink argument that carries taint, with a witness trace.
//
// The propagation contract, in evaluation terms:
//   1. assignment copies taint from the right side to the bound name
//   2. binary/logical/conditional/template expressions union operand taint
//   3. member reads inherit the object's taint; member writes taint the
//      chain's root container (field-insensitive)
//   4. object/array literals union element taint
//   5. calls resolved to same-file functions bind argument taint to
//      parameters and return taint to the call result, iterated to fixpoint
//   6. unknown calls pass any argument taint to their result and are still
//      checked as sinks
//   7. catch parameters and err/error callback parameters seed error-message
//      taint when the catalog carries those entries
//   8. nothing removes taint

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "redflow/catalog.hpp"
#include "redflow/diag.hpp"
#include "redflow/js/ast.hpp"
#include "redflow/js/parser.hpp"

namespace redflow {

struct Endpoint {
  EndpointKind kind = EndpointKind::Source;
  std::string entry_id;
  std::string file;
  int line = 0;
  std::string symbol;
  DataClass data_class = DataClass::Misc;               // sources
  SinkCategory sink_category = SinkCategory::OtherNode; // sinks
};

struct EndpointKey {
  std::string file;
  int line = 0;
  std::string symbol;

  auto operator<=>(const EndpointKey&) const = default;
};

inline EndpointKey key_of(const Endpoint& e) { return {e.file, e.line, e.symbol}; }

struct FlowStep {
  std::string file;
  int line = 0;
  std::string description;
};

struct TaintFlow {
  Endpoint source;
  Endpoint sink;
  std::vector<FlowStep> steps;
  DataClass data_class = DataClass::Misc;
};

struct FileAnalysis {
  std::vector<Endpoint> endpoints; // every syntactic match, pre-flow
  std::vector<TaintFlow> flows;
  std::vector<Diagnostic> diagnostics;
  bool truncated = false;
};

namespace detail_taint {

constexpr int kMaxPasses = 64;
constexpr int kAliasPasses = 8;

// Where a taint fact at an expression came from: a seed endpoint right here,
// or the current taint of a variable read.
struct Origin {
  enum Kind { Seed, Var } kind = Seed;
  int index = 0; // endpoint index or variable id
};

using TaintMap = std::map<int, Origin>; // source endpoint index -> first origin

inline void merge_into(TaintMap& into, const TaintMap& from) {
  for (const auto& [s, o] : from) into.emplace(s, o);
}

struct WitnessStep {
  int line = 0;
  std::string description;
  Origin prev;
};

struct Scope {
  int parent = -1;
  std::map<std::string, int> names;
};

struct VarAttrs {
  std::set<const js::AstNode*> functions; // function values the name may hold
  std::string module_of;                  // module name when bound to a require()
  bool node_object = false;               // alias of the node object
};

// Names bound by a declaration target (identifier or destructuring pattern).
inline void pattern_names(const js::AstNode* target, std::vector<const js::AstNode*>& out) {
  if (!target) return;
  switch (target->kind) {
    case js::AstKind::Identifier:
      out.push_back(target);
      break;
    case js::AstKind::Param:
    case js::AstKind::RestParam:
      if (!target->value.empty()) out.push_back(target);
      for (auto& c : target->children)
        if (c->kind != js::AstKind::Identifier) pattern_names(c.get(), out);
      break;
    case js::AstKind::ObjectPattern:
    case js::AstKind::ArrayPattern:
      for (auto& c : target->children) pattern_names(c.get(), out);
      break;
    case js::AstKind::PatternProp:
      pattern_names(target->child(0), out);
      break;
    default:
      break;
  }
}

inline const char* binding_name(const js::AstNode* n) {
  return n->kind == js::AstKind::Identifier ? n->value.c_str() : n->value.c_str();
}

} // namespace detail_taint

class FileTaintAnalysis {
 public:
  FileTaintAnalysis(const js::SyntaxTree& tree, const Catalog& catalog)
      : tree_(tree), catalog_(catalog), file_(tree.file) {}

  FileAnalysis run() {
    for (const Diagnostic& d : tree_.parse_errors) result_.diagnostics.push_back(d);
    if (!tree_.program) return std::move(result_);

    build_scopes();
    static_bindings();
    register_endpoints();
    seed_initial_state();

    bool changed = true;
    int passes = 0;
    while (changed && passes < detail_taint::kMaxPasses) {
      changed = false;
      ++passes;
      run_pass(/*record=*/false, changed);
    }
    if (changed) {
      result_.truncated = true;
      result_.diagnostics.push_back(make_warning(
          file_, 0, "taint propagation truncated after " +
                        std::to_string(detail_taint::kMaxPasses) + " passes"));
    }
    bool ignore = false;
    run_pass(/*record=*/true, ignore);

    std::sort(result_.flows.begin(), result_.flows.end(),
              [](const TaintFlow& a, const TaintFlow& b) {
                auto ka = std::tuple(key_of(a.source), key_of(a.sink), a.sink.entry_id);
                auto kb = std::tuple(key_of(b.source), key_of(b.sink), b.sink.entry_id);
                return ka < kb;
              });
    return std::move(result_);
  }

 private:
  using AstNode = js::AstNode;
  using AstKind = js::AstKind;
  using Origin = detail_taint::Origin;
  using TaintMap = detail_taint::TaintMap;

  const js::SyntaxTree& tree_;
  const Catalog& catalog_;
  std::string file_;
  FileAnalysis result_;

  // scopes and variables
  std::vector<detail_taint::Scope> scopes_;
  std::map<const AstNode*, int> fn_scope_;     // Function node -> its scope
  std::map<const AstNode*, int> fn_return_;    // Function node -> return pseudo-var
  std::vector<const AstNode*> functions_;      // all Function nodes, walk order
  std::map<const AstNode*, const AstNode*> fn_parent_; // Function -> enclosing Function
  int var_count_ = 0;

  std::vector<detail_taint::VarAttrs> attrs_;
  std::set<const AstNode*> constructor_fns_; // functions whose `this` is the node

  // endpoint matches bound to syntax occurrences
  std::map<const AstNode*, int> read_source_;   // Member -> source endpoint
  std::map<const AstNode*, int> call_source_;   // Call -> return-value source endpoint
  std::map<const AstNode*, const CatalogEntry*> call_sink_;
  std::map<const AstNode*, int> call_sink_ep_;
  std::map<const AstNode*, std::vector<const AstNode*>> resolved_calls_;
  std::vector<std::pair<int, int>> var_seeds_;  // (var, endpoint)

  // taint state
  std::vector<TaintMap> state_; // per var: source -> first origin
  std::vector<std::map<int, detail_taint::WitnessStep>> witness_;
  std::set<std::pair<int, int>> emitted_; // (source ep, sink ep) dedup

  // ---------------------------------------------------------------- scopes

  int new_scope(int parent) {
    scopes_.push_back({parent, {}});
    return static_cast<int>(scopes_.size()) - 1;
  }

  int declare(int scope, const std::string& name) {
    auto it = scopes_[scope].names.find(name);
    if (it != scopes_[scope].names.end()) return it->second;
    int id = var_count_++;
    scopes_[scope].names.emplace(name, id);
    // implicit globals appear at any stage, so the tables grow with them
    attrs_.resize(var_count_);
    state_.resize(var_count_);
    witness_.resize(var_count_);
    return id;
  }

  int resolve(int scope, const std::string& name) {
    for (int s = scope; s != -1; s = scopes_[s].parent) {
      auto it = scopes_[s].names.find(name);
      if (it != scopes_[s].names.end()) return it->second;
    }
    return declare(0, name); // implicit global
  }

  void build_scopes() {
    int module_scope = new_scope(-1);
    declare(module_scope, "this");
    collect_function_tree(tree_.program.get(), nullptr);
    hoist(tree_.program.get(), module_scope, nullptr);
    for (const AstNode* fn : functions_) {
      int parent_scope = enclosing_scope(fn);
      int s = new_scope(parent_scope);
      fn_scope_[fn] = s;
      if (!fn->arrow) declare(s, "this");
      fn_return_[fn] = declare(s, "<return>");
      if (const AstNode* params = fn->child(0)) {
        std::vector<const AstNode*> names;
        for (auto& p : params->children) detail_taint::pattern_names(p.get(), names);
        for (const AstNode* n : names) declare(s, n->value);
      }
      if (const AstNode* body = fn->child(1)) hoist(body, s, fn);
    }
  }

  void collect_function_tree(AstNode* n, const AstNode* enclosing) {
    if (!n) return;
    if (n->kind == AstKind::Function) {
      functions_.push_back(n);
      fn_parent_[n] = enclosing;
      for (auto& c : n->children) collect_function_tree(c.get(), n);
      return;
    }
    for (auto& c : n->children) collect_function_tree(c.get(), enclosing);
  }

  int enclosing_scope(const AstNode* fn) {
    const AstNode* p = fn_parent_.at(fn);
    return p ? fn_scope_.at(p) : 0;
  }

  // Declares every binding introduced directly inside one function body
  // (var/let/const/function/catch/loop targets/imports), with blocks treated
  // as function scope. Nested function bodies are skipped.
  void hoist(const AstNode* n, int scope, const AstNode* fn) {
    if (!n) return;
    switch (n->kind) {
      case AstKind::Function:
        // the name binds the function value, so same-file calls resolve
        if (!n->value.empty()) attrs_[declare(scope, n->value)].functions.insert(n);
        return; // nested body handled by its own scope
      case AstKind::Class:
        if (!n->value.empty()) declare(scope, n->value);
        return;
      case AstKind::Declarator: {
        std::vector<const AstNode*> names;
        detail_taint::pattern_names(n->child(0), names);
        for (const AstNode* name : names) declare(scope, name->value);
        hoist(n->child(1), scope, fn);
        return;
      }
      case AstKind::CatchClause:
        if (!n->value.empty()) declare(scope, n->value);
        break;
      case AstKind::ImportDecl:
        for (auto& c : n->children)
          if (c->kind == AstKind::Identifier) declare(scope, c->value);
        return;
      default:
        break;
    }
    for (auto& c : n->children) hoist(c.get(), scope, fn);
  }

  // -------------------------------------------------------- static binding

  // Variable attributes (held functions, module bindings, node aliases)
  // propagated over simple copies, iterated a bounded number of rounds.
  void static_bindings() {
    // constructor detection: direct createNode(this, ...) call, or function
    // registered as the node constructor
    for (const AstNode* fn : functions_) {
      const AstNode* body = fn->child(1);
      if (body && body_calls_create_node(body)) constructor_fns_.insert(fn);
    }
    js::walk(tree_.program.get(), [&](AstNode* n) {
      if (n->kind != AstKind::Call) return;
      auto chain = js::member_chain(n->child(0));
      if (!chain.empty() && chain.back() == "registerType" && n->children.size() >= 3) {
        const AstNode* ctor = n->child(2);
        if (ctor && ctor->kind == AstKind::Function) constructor_fns_.insert(ctor);
        if (ctor && ctor->kind == AstKind::Identifier) {
          // registered by name: mark every function that name may hold later
          pending_ctor_names_.push_back(ctor->value);
        }
      }
    });

    struct Copy {
      int dst;
      int src;
    };
    std::vector<Copy> copies;

    auto bind_rhs = [&](int var, const AstNode* rhs, const AstNode* fn, int scope) {
      if (!rhs) return;
      if (rhs->kind == AstKind::Function) {
        attrs_[var].functions.insert(rhs);
        return;
      }
      if (rhs->kind == AstKind::Identifier) {
        copies.push_back({var, resolve(scope, rhs->value)});
        return;
      }
      if (rhs->kind == AstKind::ThisExpr) {
        if (this_is_node(fn)) attrs_[var].node_object = true;
        return;
      }
      if (rhs->kind == AstKind::Call) {
        const AstNode* callee = rhs->child(0);
        if (callee && callee->kind == AstKind::Identifier && callee->value == "require" &&
            rhs->children.size() >= 2 && rhs->child(1)->kind == AstKind::String) {
          attrs_[var].module_of = rhs->child(1)->value;
        }
        return;
      }
      if (rhs->kind == AstKind::New) {
        const AstNode* callee = rhs->child(0);
        if (callee && callee->kind == AstKind::Identifier)
          copies.push_back({var, resolve(scope, callee->value)}); // module tag flows
        return;
      }
    };

    for_each_binding([&](const AstNode* target, const AstNode* rhs, const AstNode* fn,
                         int scope) {
      if (target->kind == AstKind::Identifier)
        bind_rhs(resolve(scope, target->value), rhs, fn, scope);
    });

    for (int round = 0; round < detail_taint::kAliasPasses; ++round) {
      bool changed = false;
      for (const Copy& c : copies) {
        detail_taint::VarAttrs& d = attrs_[c.dst];
        const detail_taint::VarAttrs& s = attrs_[c.src];
        size_t before = d.functions.size();
        d.functions.insert(s.functions.begin(), s.functions.end());
        if (d.functions.size() != before) changed = true;
        if (d.module_of.empty() && !s.module_of.empty()) {
          d.module_of = s.module_of;
          changed = true;
        }
        if (!d.node_object && s.node_object) {
          d.node_object = true;
          changed = true;
        }
      }
      if (!changed) break;
    }

    // functions registered as constructors by name
    for (const std::string& name : pending_ctor_names_) {
      int v = resolve(0, name);
      for (const AstNode* fn : attrs_[v].functions) constructor_fns_.insert(fn);
    }
  }

  std::vector<std::string> pending_ctor_names_;

  bool body_calls_create_node(const AstNode* n) {
    if (!n) return false;
    if (n->kind == AstKind::Function) return false; // nested this differs
    if (n->kind == AstKind::Call) {
      auto chain = js::member_chain(n->child(0));
      if (chain.size() >= 2 && chain.back() == "createNode" && n->children.size() >= 2 &&
          n->child(1)->kind == AstKind::ThisExpr)
        return true;
    }
    for (auto& c : n->children)
      if (body_calls_create_node(c.get())) return true;
    return false;
  }

  // `this` denotes the node object inside a constructor and inside arrows
  // nested in one (arrows share the enclosing this).
  bool this_is_node(const AstNode* fn) const {
    while (fn) {
      if (!fn->arrow) return constructor_fns_.count(fn) > 0;
      auto it = fn_parent_.find(fn);
      fn = it == fn_parent_.end() ? nullptr : it->second;
    }
    return false;
  }

  // Walks every (target, rhs) binding: declarators and plain assignments.
  template <typename Fn>
  void for_each_binding(Fn&& fn) {
    walk_with_context(tree_.program.get(), nullptr, [&](const AstNode* n, const AstNode* efn) {
      int scope = efn ? fn_scope_.at(efn) : 0;
      if (n->kind == AstKind::Declarator && n->child(0))
        fn(n->child(0), n->child(1), efn, scope);
      else if (n->kind == AstKind::Assign && n->value == "=" && n->child(0) &&
               n->child(0)->kind == AstKind::Identifier)
        fn(n->child(0), n->child(1), efn, scope);
    });
  }

  template <typename Fn>
  void walk_with_context(const AstNode* n, const AstNode* efn, Fn&& fn) {
    if (!n) return;
    fn(n, efn);
    const AstNode* next = n->kind == AstKind::Function ? n : efn;
    for (auto& c : n->children) walk_with_context(c.get(), next, fn);
  }

  // ------------------------------------------------------ context building

  ReceiverRole root_role(const std::string& root, const AstNode* efn) const {
    if (root == "this")
      return this_is_node(efn) ? ReceiverRole::NodeObject : ReceiverRole::Any;
    if (root == "node") return ReceiverRole::NodeObject;
    if (root == "RED") return ReceiverRole::FrameworkObject;
    return ReceiverRole::Any;
  }

  void fill_root_info(const std::vector<std::string>& chain, const AstNode* efn, int scope,
                      ReceiverRole& role, std::string& module) {
    role = root_role(chain[0], efn);
    int v = chain[0] == "this" ? resolve(scope, "this") : resolve(scope, chain[0]);
    if (role == ReceiverRole::Any && attrs_[v].node_object) role = ReceiverRole::NodeObject;
    module = attrs_[v].module_of;
  }

  CallContext call_context(const AstNode* call, const AstNode* efn, int scope) {
    CallContext ctx;
    ctx.path = js::member_chain(call->child(0));
    if (!ctx.path.empty())
      fill_root_info(ctx.path, efn, scope, ctx.receiver, ctx.required_module);
    ctx.arg_count = call->children.size() > 1 ? call->children.size() - 1 : 0;
    for (size_t i = 1; i < call->children.size(); ++i) {
      const AstNode* a = call->child(i);
      if (a && a->kind == AstKind::String)
        ctx.literal_args.push_back(a->value);
      else
        ctx.literal_args.push_back(std::nullopt);
    }
    return ctx;
  }

  // --------------------------------------------------- endpoint registration

  int add_endpoint(Endpoint ep) {
    result_.endpoints.push_back(std::move(ep));
    return static_cast<int>(result_.endpoints.size()) - 1;
  }

  Endpoint source_endpoint(const CatalogEntry& e, int line, std::string symbol) {
    Endpoint ep;
    ep.kind = EndpointKind::Source;
    ep.entry_id = e.id;
    ep.file = file_;
    ep.line = line;
    ep.symbol = std::move(symbol);
    ep.data_class = entry_data_class(e);
    return ep;
  }

  void register_endpoints() {
    std::vector<std::pair<const CatalogEntry*, std::regex>> err_entries;
    for (const CatalogEntry* e : err_param_entries(catalog_))
      err_entries.emplace_back(e, std::regex(e->match.param_name_pattern, std::regex::icase));
    const CatalogEntry* catch_e = catch_entry(catalog_);

    walk_with_context(tree_.program.get(), nullptr, [&](const AstNode* n, const AstNode* efn) {
      int scope = efn ? fn_scope_.at(efn) : 0;

      if (n->kind == AstKind::Call) {
        const AstNode* callee = n->child(0);
        // same-file resolution shadows the catalog
        if (callee && callee->kind == AstKind::Identifier) {
          int v = resolve(scope, callee->value);
          if (!attrs_[v].functions.empty()) {
            resolved_calls_[n] = {attrs_[v].functions.begin(), attrs_[v].functions.end()};
          }
        }
        if (!resolved_calls_.count(n)) {
          CallContext ctx = call_context(n, efn, scope);
          if (!ctx.path.empty()) {
            if (ctx.required_module.size() > 1 && ctx.required_module[0] == '.')
              result_.diagnostics.push_back(
                  make_warning(file_, n->line,
                               "call into module '" + ctx.required_module +
                                   "' is not tracked across files"));
            if (const CatalogEntry* sink = match_sink(ctx, catalog_)) {
              Endpoint ep;
              ep.kind = EndpointKind::Sink;
              ep.entry_id = sink->id;
              ep.file = file_;
              ep.line = n->line;
              ep.symbol = js::join_chain(ctx.path);
              ep.sink_category = sink->sink_category;
              call_sink_[n] = sink;
              call_sink_ep_[n] = add_endpoint(std::move(ep));
            }
            if (const CatalogEntry* src =
                    match_call_source(ctx, catalog_, SourceKind::ReturnValue)) {
              call_source_[n] =
                  add_endpoint(source_endpoint(*src, n->line, js::join_chain(ctx.path)));
            }
            if (const CatalogEntry* src =
                    match_call_source(ctx, catalog_, SourceKind::CallbackParameter)) {
              seed_callback_params(n, *src, scope);
            }
          }
        }
        // err/error callback parameters, any call
        for (const auto& [e, re] : err_entries) {
          for (size_t i = 1; i < n->children.size(); ++i) {
            const AstNode* arg = n->child(i);
            if (!arg || arg->kind != AstKind::Function) continue;
            seed_matching_params(arg, *e, &re);
          }
        }
        return;
      }

      if (n->kind == AstKind::Try && catch_e) {
        const AstNode* cc = n->child(1);
        if (cc && cc->kind == AstKind::CatchClause && !cc->value.empty()) {
          int v = resolve(scope, cc->value);
          int ep = add_endpoint(source_endpoint(*catch_e, cc->line, cc->value));
          var_seeds_.emplace_back(v, ep);
        }
        return;
      }

      if (n->kind == AstKind::Member) {
        register_member_read(n, efn, scope);
        return;
      }

      if (n->kind == AstKind::Declarator && n->child(0)) {
        std::vector<const AstNode*> names;
        detail_taint::pattern_names(n->child(0), names);
        for (const AstNode* name : names) seed_sensitive_name(name, scope);
        return;
      }
      if (n->kind == AstKind::Function) {
        if (const AstNode* params = n->child(0)) {
          std::vector<const AstNode*> names;
          for (auto& p : params->children) detail_taint::pattern_names(p.get(), names);
          int s = fn_scope_.at(n);
          for (const AstNode* name : names) seed_sensitive_name(name, s);
        }
        return;
      }
    });
  }

  void seed_sensitive_name(const AstNode* name, int scope) {
    const CatalogEntry* e = match_name(name->value, catalog_);
    if (!e) return;
    int v = resolve(scope, name->value);
    int ep = add_endpoint(source_endpoint(*e, name->line, name->value));
    var_seeds_.emplace_back(v, ep);
  }

  void seed_callback_params(const AstNode* call, const CatalogEntry& entry, int) {
    for (size_t i = 1; i < call->children.size(); ++i) {
      if (entry.callback_arg >= 0 &&
          static_cast<size_t>(entry.callback_arg) != i - 1)
        continue;
      const AstNode* cb = call->child(i);
      if (!cb || cb->kind != AstKind::Function) continue;
      seed_matching_params(cb, entry, nullptr);
      if (entry.callback_arg >= 0) break;
    }
  }

  // Seeds the callback's parameters; a regex restricts to matching names.
  void seed_matching_params(const AstNode* fn, const CatalogEntry& entry,
                            const std::regex* name_filter) {
    const AstNode* params = fn->child(0);
    if (!params) return;
    int s = fn_scope_.at(fn);
    std::vector<const AstNode*> names;
    for (auto& p : params->children) detail_taint::pattern_names(p.get(), names);
    for (const AstNode* name : names) {
      if (name_filter && !std::regex_match(name->value, *name_filter)) continue;
      int v = resolve(s, name->value);
      int ep = add_endpoint(source_endpoint(entry, name->line, name->value));
      var_seeds_.emplace_back(v, ep);
    }
  }

  std::set<const AstNode*> considered_members_;

  // Registers at most one source per dotted read chain: the longest sub-chain
  // (from the root) that matches a property-read entry, or whose final
  // segment matches a name-pattern entry. Inner Member links are covered by
  // their outermost read and never produce separate endpoints.
  void register_member_read(const AstNode* m, const AstNode* efn, int scope) {
    if (considered_members_.count(m)) return;
    auto chain = js::member_chain(m);
    if (chain.size() < 2) return; // computed/expression links: inner chains stand alone
    for (const AstNode* inner = m; inner && inner->kind == AstKind::Member;
         inner = inner->child(0))
      considered_members_.insert(inner);
    ReceiverRole role;
    std::string module;
    fill_root_info(chain, efn, scope, role, module);
    for (size_t len = chain.size(); len >= 2; --len) {
      std::vector<std::string> sub(chain.begin(), chain.begin() + len);
      ReadContext ctx{sub, role, module};
      const CatalogEntry* e = match_property_read(ctx, catalog_);
      if (!e) e = match_name(sub.back(), catalog_);
      if (!e) continue;
      read_source_[m] = add_endpoint(source_endpoint(*e, m->line, js::join_chain(sub)));
      return;
    }
  }

  // ------------------------------------------------------------- seeding

  void seed_initial_state() {
    for (const auto& [var, ep] : var_seeds_) {
      auto [it, fresh] = state_[var].emplace(ep, Origin{Origin::Seed, ep});
      if (fresh)
        witness_[var][ep] = {result_.endpoints[ep].line,
                             "tainted at source (" + result_.endpoints[ep].entry_id + ")",
                             Origin{Origin::Seed, ep}};
    }
  }

  // ------------------------------------------------------------ fixpoint

  struct Env {
    const AstNode* fn = nullptr; // enclosing function, null at module level
    int scope = 0;
  };

  bool recording_ = false;
  bool* changed_ = nullptr;

  void run_pass(bool record, bool& changed) {
    recording_ = record;
    changed_ = &changed;
    Env module_env{nullptr, 0};
    exec_children(tree_.program.get(), module_env);
    for (const AstNode* fn : functions_) {
      Env env{fn, fn_scope_.at(fn)};
      // parameter defaults feed the parameter
      if (const AstNode* params = fn->child(0)) {
        for (auto& p : params->children) {
          if (p->kind == AstKind::Param && p->child(0)) {
            TaintMap dflt = eval(p->child(0), env);
            update_var(resolve(env.scope, p->value), dflt, p->line,
                       "default value of '" + p->value + "'");
          }
        }
      }
      exec_children(fn->child(1), env);
    }
  }

  void exec_children(const AstNode* block, Env env) {
    if (!block) return;
    for (auto& c : block->children) exec(c.get(), env);
  }

  void exec(const AstNode* n, Env env) {
    if (!n) return;
    switch (n->kind) {
      case AstKind::VarDecl:
        for (auto& d : n->children) {
          if (d->kind != AstKind::Declarator) continue;
          if (!d->child(1)) continue;
          TaintMap t = eval(d->child(1), env);
          assign_to_target(d->child(0), t, d->line, env);
        }
        return;
      case AstKind::ExprStatement:
      case AstKind::Throw:
        eval(n->child(0), env);
        return;
      case AstKind::Return: {
        TaintMap t = n->child(0) ? eval(n->child(0), env) : TaintMap{};
        if (env.fn)
          update_var(fn_return_.at(env.fn), t, n->line,
                     "returned from '" + fn_label(env.fn) + "'");
        return;
      }
      case AstKind::Block:
      case AstKind::Program:
        exec_children(n, env);
        return;
      case AstKind::If:
        eval(n->child(0), env);
        exec(n->child(1), env);
        exec(n->child(2), env);
        return;
      case AstKind::For:
        exec(n->child(0), env);
        if (n->child(1)) eval_stmt_or_expr(n->child(1), env);
        if (n->child(2)) eval_stmt_or_expr(n->child(2), env);
        exec(n->child(3), env);
        return;
      case AstKind::ForIn:
      case AstKind::ForOf: {
        TaintMap coll = eval(n->child(1), env);
        const AstNode* target = n->child(0);
        if (target) {
          if (target->kind == AstKind::VarDecl && target->child(0))
            assign_to_target(target->child(0)->child(0), coll, n->line, env);
          else
            assign_to_target(target, coll, n->line, env);
        }
        exec(n->child(2), env);
        return;
      }
      case AstKind::While:
      case AstKind::DoWhile: {
        const AstNode* cond = n->kind == AstKind::While ? n->child(0) : n->child(1);
        const AstNode* body = n->kind == AstKind::While ? n->child(1) : n->child(0);
        eval(cond, env);
        exec(body, env);
        return;
      }
      case AstKind::Try:
        exec(n->child(0), env);
        if (n->child(1) && n->child(1)->kind == AstKind::CatchClause)
          exec(n->child(1)->child(0), env);
        exec(n->child(2), env);
        return;
      case AstKind::Switch:
        eval(n->child(0), env);
        for (size_t i = 1; i < n->children.size(); ++i) {
          const AstNode* cs = n->child(i);
          if (!cs) continue;
          if (cs->child(0) && cs->child(0)->kind != AstKind::Empty) eval(cs->child(0), env);
          for (size_t j = 1; j < cs->children.size(); ++j) exec(cs->child(j), env);
        }
        return;
      case AstKind::Labeled:
        exec(n->child(0), env);
        return;
      case AstKind::Class:
        for (auto& c : n->children)
          if (c->kind == AstKind::Property && c->child(0)) eval(c->child(0), env);
        return;
      case AstKind::Function: // declaration: body runs via the function list
      case AstKind::ImportDecl:
      case AstKind::Empty:
      case AstKind::Break:
      case AstKind::Continue:
      case AstKind::Error:
        return;
      default:
        eval(n, env); // expression used in statement position
        return;
    }
  }

  void eval_stmt_or_expr(const AstNode* n, Env env) {
    if (!n || n->kind == AstKind::Empty) return;
    if (n->kind == AstKind::VarDecl)
      exec(n, env);
    else
      eval(n, env);
  }

  // ------------------------------------------------------------- evaluator

  TaintMap eval(const AstNode* n, Env env) {
    using detail_taint::merge_into;
    if (!n) return {};
    switch (n->kind) {
      case AstKind::Identifier: {
        int v = resolve(env.scope, n->value);
        return read_var(v);
      }
      case AstKind::ThisExpr: {
        int v = resolve(env.scope, "this");
        return read_var(v);
      }
      case AstKind::Member: {
        TaintMap t = n->computed && n->child(1) ? eval(n->child(1), env) : TaintMap{};
        merge_into(t, eval(n->child(0), env));
        auto it = read_source_.find(n);
        if (it != read_source_.end())
          t.emplace(it->second, Origin{Origin::Seed, it->second});
        return t;
      }
      case AstKind::Assign: {
        TaintMap rhs = eval(n->child(1), env);
        assign_to_target(n->child(0), rhs, n->line, env);
        return rhs;
      }
      case AstKind::Call:
        return eval_call(n, env, /*is_new=*/false);
      case AstKind::New:
        return eval_call(n, env, /*is_new=*/true);
      case AstKind::Binary:
      case AstKind::Logical:
      case AstKind::Conditional:
      case AstKind::Sequence:
      case AstKind::TemplateLiteral:
      case AstKind::Array:
      case AstKind::Object:
      case AstKind::Spread:
      case AstKind::Property:
      case AstKind::Unary:
      case AstKind::Update: {
        TaintMap t;
        for (auto& c : n->children) merge_into(t, eval(c.get(), env));
        return t;
      }
      case AstKind::Function:
        return {}; // function value itself carries no taint
      default:
        return {};
    }
  }

  TaintMap read_var(int v) {
    TaintMap out;
    for (const auto& [s, o] : state_[v]) out.emplace(s, Origin{Origin::Var, v});
    return out;
  }

  void assign_to_target(const AstNode* target, const TaintMap& t, int line, Env env) {
    if (!target) return;
    if (target->kind == AstKind::Identifier) {
      update_var(resolve(env.scope, target->value), t, line,
                 "assigned to '" + target->value + "'");
      return;
    }
    if (target->kind == AstKind::Member) {
      // field-insensitive: writing through a property taints the container
      const AstNode* root = target;
      while (root->kind == AstKind::Member) root = root->child(0);
      if (root && root->kind == AstKind::Identifier)
        update_var(resolve(env.scope, root->value), t, line,
                   "stored into container '" + root->value + "'");
      else if (root && root->kind == AstKind::ThisExpr)
        update_var(resolve(env.scope, "this"), t, line, "stored into 'this'");
      return;
    }
    if (target->kind == AstKind::ObjectPattern || target->kind == AstKind::ArrayPattern ||
        target->kind == AstKind::PatternProp || target->kind == AstKind::Param ||
        target->kind == AstKind::RestParam) {
      std::vector<const AstNode*> names;
      detail_taint::pattern_names(target, names);
      for (const AstNode* name : names)
        update_var(resolve(env.scope, name->value), t, line,
                   "destructured into '" + name->value + "'");
      return;
    }
  }

  void update_var(int v, const TaintMap& t, int line, const std::string& desc) {
    for (const auto& [s, o] : t) {
      if (state_[v].count(s)) continue;
      state_[v].emplace(s, o);
      witness_[v][s] = {line, desc, o};
      if (changed_) *changed_ = true;
    }
  }

  TaintMap eval_call(const AstNode* call, Env env, bool is_new) {
    using detail_taint::merge_into;
    std::vector<TaintMap> args;
    for (size_t i = 1; i < call->children.size(); ++i)
      args.push_back(eval(call->child(i), env));
    TaintMap callee_taint = eval(call->child(0), env);

    auto rc = resolved_calls_.find(call);
    if (rc != resolved_calls_.end() && !is_new) {
      TaintMap result;
      for (const AstNode* fn : rc->second) {
        bind_args_to_params(fn, call, args);
        merge_into(result, read_var(fn_return_.at(fn)));
      }
      return result;
    }
    if (is_new && call->child(0) && call->child(0)->kind == AstKind::Identifier) {
      int v = resolve(env.scope, call->child(0)->value);
      if (!attrs_[v].functions.empty()) {
        TaintMap result;
        for (const AstNode* fn : attrs_[v].functions) {
          bind_args_to_params(fn, call, args);
          merge_into(result, read_var(fn_return_.at(fn)));
        }
        return result;
      }
    }

    // catalog sink check (recording pass only emits flows)
    if (recording_) {
      auto sk = call_sink_.find(call);
      if (sk != call_sink_.end()) record_sink_hits(call, *sk->second, args);
    }

    // unknown call: arguments pass through; a matched return-value source
    // seeds the result
    TaintMap result;
    for (const TaintMap& a : args) merge_into(result, a);
    merge_into(result, callee_taint);
    auto src = call_source_.find(call);
    if (src != call_source_.end())
      result.emplace(src->second, Origin{Origin::Seed, src->second});
    return result;
  }

  void bind_args_to_params(const AstNode* fn, const AstNode* call,
                           const std::vector<TaintMap>& args) {
    const AstNode* params = fn->child(0);
    if (!params) return;
    int s = fn_scope_.at(fn);
    size_t pi = 0;
    for (auto& p : params->children) {
      if (pi >= args.size()) break;
      const std::string label = "passed to '" + fn_label(fn) + "'";
      if (p->kind == AstKind::Param) {
        update_var(resolve(s, p->value), args[pi], call->line, label);
      } else if (p->kind == AstKind::RestParam) {
        TaintMap rest;
        for (size_t r = pi; r < args.size(); ++r)
          detail_taint::merge_into(rest, args[r]);
        update_var(resolve(s, p->value), rest, call->line, label);
        break;
      } else {
        std::vector<const AstNode*> names;
        detail_taint::pattern_names(p.get(), names);
        for (const AstNode* name : names)
          update_var(resolve(s, name->value), args[pi], call->line, label);
      }
      ++pi;
    }
  }

  std::string fn_label(const AstNode* fn) const {
    if (!fn->value.empty()) return fn->value;
    return fn->arrow ? "<arrow>" : "<anonymous>";
  }

  // ------------------------------------------------------------- recording

  void record_sink_hits(const AstNode* call, const CatalogEntry& entry,
                        const std::vector<TaintMap>& args) {
    int sink_ep = call_sink_ep_.at(call);
    bool any_spread = false;
    for (size_t i = 1; i < call->children.size(); ++i)
      if (call->child(i) && call->child(i)->kind == AstKind::Spread) any_spread = true;

    auto check_arg = [&](size_t idx) {
      if (idx >= args.size()) return;
      for (const auto& [s, origin] : args[idx])
        emit_flow(s, sink_ep, origin, call->line, idx);
    };
    if (entry.taint_positions.empty() || any_spread) {
      for (size_t i = 0; i < args.size(); ++i) check_arg(i);
    } else {
      for (int p : entry.taint_positions) check_arg(static_cast<size_t>(p));
    }
  }

  void emit_flow(int source_ep, int sink_ep, Origin origin, int call_line, size_t arg_idx) {
    if (!emitted_.insert({source_ep, sink_ep}).second) return;
    TaintFlow flow;
    flow.source = result_.endpoints[source_ep];
    flow.sink = result_.endpoints[sink_ep];
    flow.data_class = flow.source.data_class;
    flow.steps = witness_chain(source_ep, origin);
    flow.steps.push_back({file_, call_line,
                          "argument " + std::to_string(arg_idx) + " of sink call '" +
                              flow.sink.symbol + "' (" + flow.sink.entry_id + ")"});
    result_.flows.push_back(std::move(flow));
  }

  std::vector<FlowStep> witness_chain(int source_ep, Origin origin) {
    std::vector<FlowStep> rev;
    int guard = 0;
    Origin cur = origin;
    while (guard++ < 10000) {
      if (cur.kind == Origin::Seed) break;
      auto& wmap = witness_[cur.index];
      auto it = wmap.find(source_ep);
      if (it == wmap.end()) break;
      rev.push_back({file_, it->second.line, it->second.description});
      Origin prev = it->second.prev;
      if (prev.kind == Origin::Var && prev.index == cur.index) break;
      cur = prev;
    }
    const Endpoint& src = result_.endpoints[source_ep];
    rev.push_back({src.file, src.line, "source '" + src.symbol + "' (" + src.entry_id + ")"});
    return {rev.rbegin(), rev.rend()};
  }
};

// Endpoints and flows for one parsed file (or one HTML script region).
inline FileAnalysis analyze_file(const js::SyntaxTree& tree, const Catalog& catalog) {
  FileTaintAnalysis analysis(tree, catalog);
  return analysis.run();
}

} // namespace redflow
