// Report assembly and rendering: record mapping, JSON shape, CSV dialect,
// sorting, and the recomputable summary.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redflow/report.hpp"

using namespace redflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Endpoint source_ep(const std::string& entry, const std::string& file, int line,
                   const std::string& symbol, DataClass dc) {
  Endpoint e;
  e.kind = EndpointKind::Source;
  e.entry_id = entry;
  e.file = file;
  e.line = line;
  e.symbol = symbol;
  e.data_class = dc;
  return e;
}

Endpoint sink_ep(const std::string& entry, const std::string& file, int line,
                 const std::string& symbol, SinkCategory cat) {
  Endpoint e;
  e.kind = EndpointKind::Sink;
  e.entry_id = entry;
  e.file = file;
  e.line = line;
  e.symbol = symbol;
  e.sink_category = cat;
  return e;
}

TaintFlow message_flow() {
  TaintFlow f;
  f.source = source_ep("listener-input", "node.js", 2, "msg", DataClass::InputMessage);
  f.sink = sink_ep("node-send", "node.js", 3, "node.send", SinkCategory::OtherNode);
  f.data_class = DataClass::InputMessage;
  f.steps = {{"node.js", 2, "source 'msg' (listener-input)"},
             {"node.js", 3, "argument 0 of sink call 'node.send' (node-send)"}};
  return f;
}

TaintFlow leak_flow() {
  TaintFlow f;
  f.source = source_ep("credentials-read", "node.js", 5, "node.credentials.key",
                       DataClass::Sensitive);
  f.sink = sink_ep("http-request", "node.js", 6, "http.request", SinkCategory::ExternalServer);
  f.data_class = DataClass::Sensitive;
  return f;
}

// Valid single-node package: 1 declared input, 1 declared output, one
// message flow, so it classifies as convergence with one low finding.
PackageRecord demo_record() {
  PackageRecord rec;
  rec.id = {"demo", "1.0.0"};
  rec.validity = Validity::Valid;
  rec.weekly_downloads = 321;
  rec.node_count = 1;
  rec.loc.total_loc = 12;
  rec.loc.per_extension = {{"js", 10}, {"ts", 0}, {"html", 2}};
  rec.specs = {{"demo", 1, 1, true, "demo.html", 4}};
  rec.totals = spec_totals(rec.specs);
  rec.flows = {message_flow()};
  for (const TaintFlow& f : rec.flows) rec.findings.push_back(classify_flow(f));
  rec.conf = ConformanceResult::make(rec.id.str(), rec.totals, merge_endpoints(rec.flows));
  return rec;
}

// Valid package with no declared ports but a sensitive flow: divergence with
// one extra source, one extra sink, and a high finding.
PackageRecord leaky_record() {
  PackageRecord rec;
  rec.id = {"leaky", "2.1.0"};
  rec.validity = Validity::Valid;
  rec.node_count = 2;
  rec.loc.total_loc = 20;
  rec.loc.per_extension = {{"js", 20}, {"ts", 0}, {"html", 0}};
  rec.specs = {{"leaky", 0, 0, true, "leaky.html", 2}};
  rec.totals = spec_totals(rec.specs);
  rec.flows = {leak_flow()};
  for (const TaintFlow& f : rec.flows) rec.findings.push_back(classify_flow(f));
  rec.conf = ConformanceResult::make(rec.id.str(), rec.totals, merge_endpoints(rec.flows));
  return rec;
}

PackageRecord broken_record(const std::string& name) {
  PackageRecord rec;
  rec.id = {name, "0.0.1"};
  rec.validity = Validity::BrokenDownload;
  return rec;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

} // namespace

TEST_CASE("records assemble from a package and its analysis") {
  fs::path root = fresh_dir("redflow-report-build");
  std::ofstream(root / "node.js") << "a();\n\nb();\n";

  NodePackage pkg;
  pkg.id = {"demo", "1.0.0"};
  pkg.root = root;
  pkg.files = {{"node.js", 10}};
  pkg.weekly_downloads = 77;
  pkg.validity = Validity::Valid;
  pkg.specs = {{"demo", 1, 1, true, "demo.html", 3}};
  pkg.node_count = 1;
  pkg.warnings = {make_warning("demo.html", 1, "spec for node 'demo' omits outputs; defaulting to 0")};

  AnalysisResult analysis;
  analysis.package = "demo@1.0.0";
  analysis.flows = {message_flow()};
  analysis.diagnostics = {
      make_warning("node.js", 4, "call into module './util' is not tracked across files")};
  analysis.truncated = true;

  PackageRecord rec = make_record(pkg, analysis);
  CHECK(rec.id.str() == "demo@1.0.0");
  CHECK(rec.validity == Validity::Valid);
  REQUIRE(rec.weekly_downloads.has_value());
  CHECK(*rec.weekly_downloads == 77);
  CHECK(rec.node_count == 1);
  CHECK(rec.loc.total_loc == 2);
  CHECK(rec.loc.per_extension.at("js") == 2);
  CHECK(rec.totals.s_in == 1);
  CHECK(rec.totals.s_out == 1);
  CHECK(rec.conf.conformance_case == ConformanceCase::Convergence);
  REQUIRE(rec.findings.size() == 1);
  CHECK(rec.truncated);
  CHECK_FALSE(rec.counted_syntactic);
  REQUIRE(rec.diagnostics.size() == 2);
  CHECK(rec.diagnostics[0].file == "demo.html");
  CHECK_THAT(rec.diagnostics[1].message, Catch::Matchers::ContainsSubstring("not tracked"));

  // syntactic counting swaps the endpoint basis
  analysis.endpoints_syntactic = {
      message_flow().source, message_flow().sink,
      source_ep("env-read", "node.js", 9, "process.env.X", DataClass::Sensitive)};
  PackageRecord syn = make_record(pkg, analysis, true);
  CHECK(syn.counted_syntactic);
  CHECK(syn.conf.d_src == 2);
  CHECK(syn.conf.d_snk == 1);
}

TEST_CASE("invalid records skip analysis-only fields") {
  NodePackage broken;
  broken.id = {"gone", "0.0.1"};
  broken.validity = Validity::BrokenDownload;
  broken.files = {{"phantom.js", 1}}; // never read for broken downloads
  PackageRecord rec = make_invalid_record(broken);
  CHECK(rec.loc.total_loc == 0);
  CHECK(rec.diagnostics.empty());
  CHECK(rec.flows.empty());
  CHECK(rec.findings.empty());

  // other invalid kinds still count lines
  fs::path root = fresh_dir("redflow-report-nonodes");
  std::ofstream(root / "theme.js") << "x();\n";
  NodePackage theme;
  theme.id = {"theme", "2.0.0"};
  theme.root = root;
  theme.files = {{"theme.js", 5}};
  theme.validity = Validity::NoNodes;
  PackageRecord trec = make_invalid_record(theme);
  CHECK(trec.loc.total_loc == 1);
}

TEST_CASE("valid record JSON carries detection, conformance, and traces") {
  json j = detail_report::record_json(demo_record());
  CHECK(j["name"] == "demo");
  CHECK(j["version"] == "1.0.0");
  CHECK(j["validity"] == "valid");
  CHECK(j["weekly_downloads"] == 321);
  CHECK(j["node_count"] == 1);
  CHECK(j["loc"]["total"] == 12);
  CHECK(j["loc"]["js"] == 10);
  CHECK(j["spec"]["inputs"] == 1);
  CHECK(j["spec"]["outputs"] == 1);
  CHECK(j["spec"]["unparsable_nodes"] == 0);
  CHECK(j["spec"]["nodes"][0]["name"] == "demo");
  CHECK(j["spec"]["nodes"][0]["file"] == "demo.html");
  CHECK(j["detected"]["sources"] == 1);
  CHECK(j["detected"]["sinks"] == 1);
  CHECK(j["conformance"]["case"] == "convergence");
  CHECK(j["conformance"]["extra_sources"] == 0);
  CHECK(j["conformance"]["counted_syntactic"] == false);
  REQUIRE(j["flows"].size() == 1);
  CHECK(j["flows"][0]["source"]["entry"] == "listener-input");
  CHECK(j["flows"][0]["source"]["data_class"] == "input-message");
  CHECK(j["flows"][0]["sink"]["category"] == "other-node");
  CHECK(j["flows"][0]["severity"] == "low");
  CHECK(j["flows"][0]["extrapolated"] == false);
  REQUIRE(j["flows"][0]["trace"].size() == 2);
  CHECK(j["flows"][0]["trace"][0]["note"] == "source 'msg' (listener-input)");
  CHECK(j["truncated"] == false);
}

TEST_CASE("invalid record JSON nulls detection and keeps diagnostics") {
  PackageRecord rec = broken_record("gone");
  rec.diagnostics = {make_warning("gone-0.0.1.tgz", 0, "gzip stream is damaged")};
  json j = detail_report::record_json(rec);
  CHECK(j["validity"] == "broken-download");
  CHECK(j["weekly_downloads"].is_null());
  CHECK(j["detected"].is_null());
  CHECK(j["conformance"].is_null());
  CHECK(j["flows"].is_array());
  CHECK(j["flows"].empty());
  REQUIRE(j["diagnostics"].size() == 1);
  CHECK(j["diagnostics"][0]["level"] == "warning");
  CHECK(j["diagnostics"][0]["message"] == "gzip stream is damaged");
}

TEST_CASE("reports sort records by id and embed a verifiable summary") {
  std::vector<PackageRecord> records = {leaky_record(), broken_record("zzz"), demo_record()};
  nlohmann::ordered_json j = report_json(records, "default-1");
  CHECK(j["schema_version"] == 1);
  CHECK(j["tool"]["name"] == "redflow");
  CHECK(j["tool"]["version"] == "0.1.0");
  CHECK(j["catalog_version"] == "default-1");
  REQUIRE(j["packages"].size() == 3);
  CHECK(j["packages"][0]["name"] == "demo");
  CHECK(j["packages"][1]["name"] == "leaky");
  CHECK(j["packages"][2]["name"] == "zzz");

  // the embedded summary is a pure function of the records, in any order;
  // comparing ordered dumps also pins the key order byte-stable
  CHECK(j["summary"].dump() == summary_json(records).dump());
}

TEST_CASE("summary aggregates cases, histogram, and risk") {
  std::vector<PackageRecord> records = {demo_record(), leaky_record(), broken_record("zzz")};
  json s = summary_json(records);
  CHECK(s["packages"] == 3);
  CHECK(s["validity"]["valid"] == 2);
  CHECK(s["validity"]["broken-download"] == 1);
  CHECK(s["validity"]["no-nodes"] == 0);
  CHECK(s["classified"] == 2);
  CHECK(s["cases"]["convergence"]["count"] == 1);
  CHECK(s["cases"]["convergence"]["percentage"] == 50.0);
  CHECK(s["cases"]["convergence"]["mean_loc"] == 12.0);
  CHECK(s["cases"]["divergence"]["count"] == 1);
  CHECK(s["cases"]["divergence"]["mean_nodes"] == 2.0);
  CHECK(s["cases"]["absence"]["count"] == 0);
  // leaky: one extra source + one extra sink
  CHECK(s["divergence_histogram"]["2"] == 1);
  CHECK(s["mean_extra_sources"] == 1.0);
  CHECK(s["mean_extra_sinks"] == 1.0);
  CHECK(s["risk"]["total"] == 2);
  CHECK(s["risk"]["severities"]["low"]["count"] == 1);
  CHECK(s["risk"]["severities"]["low"]["percentage"] == 50.0);
  CHECK(s["risk"]["severities"]["high"]["count"] == 1);
  CHECK(s["risk"]["severities"]["medium"]["count"] == 0);
  CHECK(s["risk"]["groups"].size() == 2);
}

TEST_CASE("empty corpora summarize to zeros") {
  json s = summary_json({});
  CHECK(s["packages"] == 0);
  CHECK(s["classified"] == 0);
  CHECK(s["risk"]["total"] == 0);
}

TEST_CASE("CSV emits the fixed header and one row per package") {
  std::vector<PackageRecord> records = {leaky_record(), broken_record("zzz"), demo_record()};
  auto lines = lines_of(report_csv(records));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] ==
        "package,version,validity,nodes,loc,spec_inputs,spec_outputs,unparsable_nodes,"
        "detected_sources,detected_sinks,case,extra_sources,extra_sinks,flows,high,medium,low,"
        "truncated");
  CHECK(lines[1] == "demo,1.0.0,valid,1,12,1,1,0,1,1,convergence,0,0,1,0,0,1,false");
  CHECK(lines[2] == "leaky,2.1.0,valid,2,20,0,0,0,1,1,divergence,1,1,1,1,0,0,false");
  // invalid rows blank the nine analysis fields
  CHECK(lines[3] == "zzz,0.0.1,broken-download,0,0,0,0,0,,,,,,,,,,false");
}

TEST_CASE("CSV quotes only fields that need it") {
  PackageRecord odd = broken_record("we\"ird,name");
  odd.truncated = true;
  auto lines = lines_of(report_csv({odd}));
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "\"we\"\"ird,name\",0.0.1,broken-download,0,0,0,0,0,,,,,,,,,,true");
}

TEST_CASE("render_report dispatches on the format name") {
  std::vector<PackageRecord> records = {demo_record()};
  std::string csv = render_report(records, "default-1", "csv");
  CHECK_THAT(csv, Catch::Matchers::StartsWith("package,version"));

  std::string text = render_report(records, "default-1", "json");
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');
  json j = json::parse(text);
  CHECK(j["schema_version"] == 1);
  CHECK(j["packages"][0]["name"] == "demo");
}
