#pragma once

// Report assembly. One record per scanned package plus a corpus summary,
// rendered as JSON or CSV. Output is byte-stable: records sort by package id,
// object keys keep insertion order, numbers are rounded before emission, and
// nothing time- or host-dependent is written.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redflow/conformance.hpp"
#include "redflow/package.hpp"
#include "redflow/risk.hpp"

namespace redflow {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "redflow";
inline constexpr const char* kToolVersion = "0.1.0";

struct PackageRecord {
  PackageId id;
  Validity validity = Validity::BrokenDownload;
  std::optional<long long> weekly_downloads;
  int node_count = 0;
  LocStats loc;
  SpecTotals totals;
  std::vector<NodeSpec> specs;
  ConformanceResult conf; // meaningful only when validity == Valid
  std::vector<TaintFlow> flows;
  std::vector<RiskFinding> findings;
  std::vector<Diagnostic> diagnostics;
  bool truncated = false;
  bool counted_syntactic = false;
};

inline PackageRecord make_record(const NodePackage& pkg, const AnalysisResult& analysis,
                                 bool count_syntactic = false) {
  PackageRecord rec;
  rec.id = pkg.id;
  rec.validity = pkg.validity;
  rec.weekly_downloads = pkg.weekly_downloads;
  rec.node_count = pkg.node_count;
  rec.specs = pkg.specs;
  rec.totals = spec_totals(pkg.specs);
  rec.diagnostics = pkg.warnings;
  rec.loc = count_loc(pkg, &rec.diagnostics);
  rec.counted_syntactic = count_syntactic;

  MergedEndpoints merged = count_syntactic ? merge_syntactic(analysis.endpoints_syntactic)
                                           : merge_endpoints(analysis.flows);
  rec.conf = ConformanceResult::make(pkg.id.str(), rec.totals, merged);
  rec.flows = analysis.flows;
  rec.findings.reserve(rec.flows.size());
  for (const TaintFlow& f : rec.flows) rec.findings.push_back(classify_flow(f));
  for (const Diagnostic& d : analysis.diagnostics) rec.diagnostics.push_back(d);
  rec.truncated = analysis.truncated;
  return rec;
}

// Record for a package that never reached analysis (broken download, no node
// entries, or an unparsable spec).
inline PackageRecord make_invalid_record(const NodePackage& pkg) {
  PackageRecord rec;
  rec.id = pkg.id;
  rec.validity = pkg.validity;
  rec.weekly_downloads = pkg.weekly_downloads;
  rec.node_count = pkg.node_count;
  rec.specs = pkg.specs;
  rec.totals = spec_totals(pkg.specs);
  rec.diagnostics = pkg.warnings;
  if (pkg.validity != Validity::BrokenDownload) rec.loc = count_loc(pkg, &rec.diagnostics);
  return rec;
}

namespace detail_report {

inline double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

inline void sort_records(std::vector<PackageRecord>& records) {
  // Stable so duplicate ids keep input order and reports stay byte-identical.
  std::stable_sort(records.begin(), records.end(),
                   [](const PackageRecord& a, const PackageRecord& b) { return a.id < b.id; });
}

inline nlohmann::ordered_json flow_json(const TaintFlow& f, const RiskFinding& r) {
  nlohmann::ordered_json j;
  j["source"] = {{"entry", f.source.entry_id},
                 {"file", f.source.file},
                 {"line", f.source.line},
                 {"symbol", f.source.symbol},
                 {"data_class", to_string(f.data_class)}};
  j["sink"] = {{"entry", f.sink.entry_id},
               {"file", f.sink.file},
               {"line", f.sink.line},
               {"symbol", f.sink.symbol},
               {"category", to_string(f.sink.sink_category)}};
  j["severity"] = to_string(r.severity);
  j["group"] = r.group;
  j["extrapolated"] = r.extrapolated;
  j["data_class_missing"] = r.data_class_missing;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const FlowStep& s : f.steps)
    trace.push_back({{"file", s.file}, {"line", s.line}, {"note", s.description}});
  j["trace"] = std::move(trace);
  return j;
}

inline nlohmann::ordered_json record_json(const PackageRecord& rec) {
  nlohmann::ordered_json j;
  j["name"] = rec.id.name;
  j["version"] = rec.id.version;
  j["validity"] = to_string(rec.validity);
  if (rec.weekly_downloads)
    j["weekly_downloads"] = *rec.weekly_downloads;
  else
    j["weekly_downloads"] = nullptr;
  j["node_count"] = rec.node_count;
  j["loc"] = {{"total", rec.loc.total_loc}};
  for (const auto& [ext, n] : rec.loc.per_extension) j["loc"][ext] = n;

  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const NodeSpec& s : rec.specs)
    nodes.push_back({{"name", s.node_name},
                     {"inputs", s.inputs},
                     {"outputs", s.outputs},
                     {"parsable", s.parsable},
                     {"file", s.file},
                     {"line", s.line}});
  j["spec"] = {{"inputs", rec.totals.s_in},
               {"outputs", rec.totals.s_out},
               {"unparsable_nodes", rec.totals.unparsable_nodes},
               {"nodes", std::move(nodes)}};

  if (rec.validity == Validity::Valid) {
    j["detected"] = {{"sources", rec.conf.d_src}, {"sinks", rec.conf.d_snk}};
    j["conformance"] = {{"case", to_string(rec.conf.conformance_case)},
                        {"extra_sources", rec.conf.extra_src},
                        {"extra_sinks", rec.conf.extra_snk},
                        {"counted_syntactic", rec.counted_syntactic}};
    nlohmann::ordered_json flows = nlohmann::ordered_json::array();
    for (size_t i = 0; i < rec.flows.size(); ++i)
      flows.push_back(flow_json(rec.flows[i], rec.findings[i]));
    j["flows"] = std::move(flows);
  } else {
    j["detected"] = nullptr;
    j["conformance"] = nullptr;
    j["flows"] = nlohmann::ordered_json::array();
  }

  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (const Diagnostic& d : rec.diagnostics)
    diags.push_back({{"level", to_string(d.level)},
                     {"file", d.file},
                     {"line", d.line},
                     {"message", d.message}});
  j["diagnostics"] = std::move(diags);
  j["truncated"] = rec.truncated;
  return j;
}

} // namespace detail_report

// Corpus-level aggregation recomputed from the records. Keeping this a pure
// function of the records is what lets a reader verify the embedded summary.
inline nlohmann::ordered_json summary_json(const std::vector<PackageRecord>& records) {
  std::vector<ConformanceResult> conf;
  std::map<std::string, int> loc, nodes;
  std::vector<RiskFinding> findings;
  std::map<std::string, int> validity_counts;
  for (Validity v : {Validity::Valid, Validity::BrokenDownload, Validity::NoNodes,
                     Validity::UnparsableSpec})
    validity_counts[to_string(v)] = 0;

  for (const PackageRecord& rec : records) {
    ++validity_counts[to_string(rec.validity)];
    if (rec.validity != Validity::Valid) continue;
    conf.push_back(rec.conf);
    loc[rec.conf.package] = rec.loc.total_loc;
    nodes[rec.conf.package] = rec.node_count;
    for (const RiskFinding& f : rec.findings) findings.push_back(f);
  }

  CorpusSummary cs = aggregate(conf, loc, nodes);
  RiskSummary rs = summarize_risk(findings);

  nlohmann::ordered_json j;
  j["packages"] = static_cast<int>(records.size());
  j["validity"] = validity_counts;
  j["classified"] = cs.classified;
  nlohmann::ordered_json cases;
  for (const auto& [name, stat] : cs.per_case)
    cases[name] = {{"count", stat.count},
                   {"percentage", stat.percentage},
                   {"mean_nodes", detail_report::round4(stat.mean_nodes)},
                   {"mean_loc", detail_report::round4(stat.mean_loc)}};
  j["cases"] = std::move(cases);
  nlohmann::ordered_json hist;
  for (const auto& [extras, count] : cs.divergence_histogram)
    hist[std::to_string(extras)] = count;
  j["divergence_histogram"] = std::move(hist);
  j["mean_extra_sources"] = detail_report::round4(cs.mean_extra_sources);
  j["mean_extra_sinks"] = detail_report::round4(cs.mean_extra_sinks);

  nlohmann::ordered_json sev;
  for (const auto& [name, count] : rs.severity_counts)
    sev[name] = {{"count", count}, {"percentage", rs.severity_percentages.at(name)}};
  j["risk"] = {{"total", rs.total}, {"severities", std::move(sev)}, {"groups", rs.group_counts}};
  return j;
}

inline nlohmann::ordered_json report_json(std::vector<PackageRecord> records,
                                          const std::string& catalog_version) {
  detail_report::sort_records(records);
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["catalog_version"] = catalog_version;
  nlohmann::ordered_json pkgs = nlohmann::ordered_json::array();
  for (const PackageRecord& rec : records) pkgs.push_back(detail_report::record_json(rec));
  j["packages"] = std::move(pkgs);
  j["summary"] = summary_json(records);
  return j;
}

// CSV with one row per package; fields that require a valid package stay
// empty for invalid ones. Quotes only where the dialect demands them.
inline std::string report_csv(std::vector<PackageRecord> records) {
  detail_report::sort_records(records);
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += "\"\"";
      else out += c;
    }
    out += "\"";
    return out;
  };
  std::string csv =
      "package,version,validity,nodes,loc,spec_inputs,spec_outputs,unparsable_nodes,"
      "detected_sources,detected_sinks,case,extra_sources,extra_sinks,flows,high,medium,low,"
      "truncated\n";
  for (const PackageRecord& rec : records) {
    csv += field(rec.id.name) + "," + field(rec.id.version) + "," + to_string(rec.validity);
    csv += "," + std::to_string(rec.node_count) + "," + std::to_string(rec.loc.total_loc);
    csv += "," + std::to_string(rec.totals.s_in) + "," + std::to_string(rec.totals.s_out);
    csv += "," + std::to_string(rec.totals.unparsable_nodes);
    if (rec.validity == Validity::Valid) {
      int high = 0, medium = 0, low = 0;
      for (const RiskFinding& f : rec.findings) {
        if (f.severity == Severity::High) ++high;
        else if (f.severity == Severity::Medium) ++medium;
        else ++low;
      }
      csv += "," + std::to_string(rec.conf.d_src) + "," + std::to_string(rec.conf.d_snk);
      csv += std::string(",") + to_string(rec.conf.conformance_case);
      csv += "," + std::to_string(rec.conf.extra_src) + "," + std::to_string(rec.conf.extra_snk);
      csv += "," + std::to_string(rec.flows.size());
      csv += "," + std::to_string(high) + "," + std::to_string(medium) + "," + std::to_string(low);
    } else {
      csv += ",,,,,,,,,";
    }
    csv += rec.truncated ? ",true\n" : ",false\n";
  }
  return csv;
}

inline std::string render_report(const std::vector<PackageRecord>& records,
                                 const std::string& catalog_version, const std::string& format) {
  if (format == "csv") return report_csv(records);
  return report_json(records, catalog_version).dump(2) + "\n";
}

} // namespace redflow
