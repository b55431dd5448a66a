#pragma once

// Conformance comparison: merge duplicate endpoints, compare detected counts
// against declared port totals, classify, and aggregate corpus statistics.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "redflow/spec_parser.hpp"
#include "redflow/taint.hpp"

namespace redflow {

enum class ConformanceCase { Convergence, Divergence, Absence };

inline std::string to_string(ConformanceCase c) {
  switch (c) {
    case ConformanceCase::Convergence: return "convergence";
    case ConformanceCase::Divergence: return "divergence";
    case ConformanceCase::Absence: return "absence";
  }
  return "?";
}

struct MergedEndpoints {
  std::set<EndpointKey> sources;
  std::set<EndpointKey> sinks;
};

// Distinct endpoints over the flows of one package. Only endpoints that
// participate in at least one flow are counted; identity is (file, line,
// symbol), so repeated flows through one endpoint collapse.
inline MergedEndpoints merge_endpoints(const std::vector<TaintFlow>& flows) {
  MergedEndpoints m;
  for (const TaintFlow& f : flows) {
    m.sources.insert(key_of(f.source));
    m.sinks.insert(key_of(f.sink));
  }
  return m;
}

// Distinct endpoints over syntactic matches, for the sensitivity flag.
inline MergedEndpoints merge_syntactic(const std::vector<Endpoint>& endpoints) {
  MergedEndpoints m;
  for (const Endpoint& e : endpoints) {
    if (e.kind == EndpointKind::Source)
      m.sources.insert(key_of(e));
    else
      m.sinks.insert(key_of(e));
  }
  return m;
}

// Decision rule: more detected than declared on either side is divergence;
// otherwise fewer on either side is absence; otherwise convergence.
// Divergence takes precedence when one side diverges and the other is short.
inline ConformanceCase classify(int s_in, int s_out, int d_src, int d_snk) {
  if (d_src > s_in || d_snk > s_out) return ConformanceCase::Divergence;
  if (d_src < s_in || d_snk < s_out) return ConformanceCase::Absence;
  return ConformanceCase::Convergence;
}

struct ConformanceResult {
  std::string package; // name@version
  int s_in = 0;
  int s_out = 0;
  int d_src = 0;
  int d_snk = 0;
  ConformanceCase conformance_case = ConformanceCase::Convergence;
  int extra_src = 0; // max(0, d_src - s_in)
  int extra_snk = 0; // max(0, d_snk - s_out)
  int unparsable_nodes = 0;

  static ConformanceResult make(std::string package, const SpecTotals& totals,
                                const MergedEndpoints& merged) {
    ConformanceResult r;
    r.package = std::move(package);
    r.s_in = totals.s_in;
    r.s_out = totals.s_out;
    r.unparsable_nodes = totals.unparsable_nodes;
    r.d_src = static_cast<int>(merged.sources.size());
    r.d_snk = static_cast<int>(merged.sinks.size());
    r.conformance_case = classify(r.s_in, r.s_out, r.d_src, r.d_snk);
    r.extra_src = std::max(0, r.d_src - r.s_in);
    r.extra_snk = std::max(0, r.d_snk - r.s_out);
    return r;
  }
};

// One decimal place, half away from zero, as a number (12.25 -> 12.3).
inline double round1(double v) { return std::round(v * 10.0) / 10.0; }
inline double percent(int part, int whole) {
  return whole == 0 ? 0.0 : round1(100.0 * part / whole);
}

struct CaseStats {
  int count = 0;
  double percentage = 0.0;
  double mean_nodes = 0.0;
  double mean_loc = 0.0;
};

struct CorpusSummary {
  int classified = 0;
  std::map<std::string, CaseStats> per_case; // keyed by case name
  std::map<int, int> divergence_histogram;   // extra_src+extra_snk -> packages
  double mean_extra_sources = 0.0;           // over divergent packages
  double mean_extra_sinks = 0.0;
};

// Corpus aggregation: per-case counts/percentages and means, the divergence
// histogram over combined extras, and mean extras over divergent packages.
inline CorpusSummary aggregate(const std::vector<ConformanceResult>& results,
                               const std::map<std::string, int>& loc,
                               const std::map<std::string, int>& nodes_per_pkg) {
  CorpusSummary s;
  s.classified = static_cast<int>(results.size());
  for (ConformanceCase c : {ConformanceCase::Convergence, ConformanceCase::Divergence,
                            ConformanceCase::Absence})
    s.per_case[to_string(c)] = {};

  std::map<std::string, long long> loc_sum, node_sum;
  int divergent = 0;
  long long extra_src_sum = 0, extra_snk_sum = 0;
  for (const ConformanceResult& r : results) {
    std::string key = to_string(r.conformance_case);
    CaseStats& cs = s.per_case[key];
    ++cs.count;
    auto lit = loc.find(r.package);
    auto nit = nodes_per_pkg.find(r.package);
    loc_sum[key] += lit == loc.end() ? 0 : lit->second;
    node_sum[key] += nit == nodes_per_pkg.end() ? 0 : nit->second;
    if (r.conformance_case == ConformanceCase::Divergence) {
      ++divergent;
      extra_src_sum += r.extra_src;
      extra_snk_sum += r.extra_snk;
      ++s.divergence_histogram[r.extra_src + r.extra_snk];
    }
  }
  for (auto& [key, cs] : s.per_case) {
    cs.percentage = percent(cs.count, s.classified);
    cs.mean_nodes = cs.count == 0 ? 0.0 : static_cast<double>(node_sum[key]) / cs.count;
    cs.mean_loc = cs.count == 0 ? 0.0 : static_cast<double>(loc_sum[key]) / cs.count;
  }
  if (divergent > 0) {
    s.mean_extra_sources = static_cast<double>(extra_src_sum) / divergent;
    s.mean_extra_sinks = static_cast<double>(extra_snk_sum) / divergent;
  }
  return s;
}

} // namespace redflow
