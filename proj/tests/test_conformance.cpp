#include <catch2/catch_amalgamated.hpp>

#include "redflow/conformance.hpp"

using namespace redflow;

namespace {

TaintFlow flow_at(const std::string& sf, int sl, const std::string& ss,
                  const std::string& kf, int kl, const std::string& ks) {
  TaintFlow f;
  f.source.kind = EndpointKind::Source;
  f.source.file = sf;
  f.source.line = sl;
  f.source.symbol = ss;
  f.sink.kind = EndpointKind::Sink;
  f.sink.file = kf;
  f.sink.line = kl;
  f.sink.symbol = ks;
  return f;
}

} // namespace

TEST_CASE("classify follows the divergence-first decision rule") {
  CHECK(classify(1, 1, 1, 1) == ConformanceCase::Convergence);
  CHECK(classify(0, 0, 0, 0) == ConformanceCase::Convergence);
  CHECK(classify(1, 1, 2, 1) == ConformanceCase::Divergence);
  CHECK(classify(1, 1, 1, 2) == ConformanceCase::Divergence);
  CHECK(classify(1, 2, 0, 1) == ConformanceCase::Absence);
  CHECK(classify(1, 1, 0, 0) == ConformanceCase::Absence);
  // one side over, the other short: divergence wins
  CHECK(classify(1, 1, 0, 2) == ConformanceCase::Divergence);
  CHECK(classify(1, 1, 2, 0) == ConformanceCase::Divergence);
}

TEST_CASE("merge_endpoints counts distinct flow endpoints") {
  std::vector<TaintFlow> flows = {
      flow_at("a.js", 3, "msg", "a.js", 9, "node.send"),
      flow_at("a.js", 3, "msg", "a.js", 9, "node.send"),  // exact repeat
      flow_at("a.js", 3, "msg", "a.js", 12, "node.send"), // second sink
      flow_at("b.js", 3, "msg", "a.js", 9, "node.send"),  // same line, other file
  };
  MergedEndpoints m = merge_endpoints(flows);
  CHECK(m.sources.size() == 2);
  CHECK(m.sinks.size() == 2);
}

TEST_CASE("merge_syntactic separates kinds by endpoint identity") {
  Endpoint src{EndpointKind::Source, "e1", "a.js", 1, "msg", DataClass::InputMessage,
               SinkCategory::OtherNode};
  Endpoint src_dup = src;
  Endpoint snk{EndpointKind::Sink, "e2", "a.js", 5, "node.send", DataClass::Misc,
               SinkCategory::OtherNode};
  MergedEndpoints m = merge_syntactic({src, src_dup, snk});
  CHECK(m.sources.size() == 1);
  CHECK(m.sinks.size() == 1);
}

TEST_CASE("ConformanceResult keeps extras non-negative") {
  SpecTotals totals{1, 2, 1};
  MergedEndpoints merged;
  merged.sources = {{"a.js", 1, "msg"}, {"a.js", 2, "cfg"}, {"a.js", 3, "env"}};
  merged.sinks = {{"a.js", 9, "node.send"}};
  ConformanceResult r = ConformanceResult::make("pkg@1.0.0", totals, merged);
  CHECK(r.package == "pkg@1.0.0");
  CHECK(r.s_in == 1);
  CHECK(r.s_out == 2);
  CHECK(r.d_src == 3);
  CHECK(r.d_snk == 1);
  CHECK(r.conformance_case == ConformanceCase::Divergence);
  CHECK(r.extra_src == 2);
  CHECK(r.extra_snk == 0); // short side clamps to zero
  CHECK(r.unparsable_nodes == 1);
}

TEST_CASE("round1 and percent round half away from zero") {
  CHECK(round1(12.25) == 12.3);
  CHECK(round1(12.24) == 12.2);
  CHECK(round1(0.0) == 0.0);
  CHECK(percent(1, 3) == 33.3);
  CHECK(percent(2, 3) == 66.7);
  CHECK(percent(5, 0) == 0.0);
  CHECK(percent(3, 3) == 100.0);
}

TEST_CASE("aggregate computes case stats, means, and the histogram") {
  auto result = [](const std::string& pkg, int s_in, int s_out, int d_src, int d_snk) {
    ConformanceResult r;
    r.package = pkg;
    r.s_in = s_in;
    r.s_out = s_out;
    r.d_src = d_src;
    r.d_snk = d_snk;
    r.conformance_case = classify(s_in, s_out, d_src, d_snk);
    r.extra_src = std::max(0, d_src - s_in);
    r.extra_snk = std::max(0, d_snk - s_out);
    return r;
  };
  std::vector<ConformanceResult> results = {
      result("a@1", 1, 1, 1, 1), // convergence
      result("b@1", 1, 1, 3, 1), // divergence, extras 2+0
      result("c@1", 1, 1, 2, 3), // divergence, extras 1+2
      result("d@1", 1, 1, 0, 1), // absence
  };
  std::map<std::string, int> loc = {{"a@1", 100}, {"b@1", 300}, {"c@1", 500}, {"d@1", 50}};
  std::map<std::string, int> nodes = {{"a@1", 1}, {"b@1", 2}, {"c@1", 4}, {"d@1", 1}};

  CorpusSummary s = aggregate(results, loc, nodes);
  CHECK(s.classified == 4);
  CHECK(s.per_case.at("convergence").count == 1);
  CHECK(s.per_case.at("divergence").count == 2);
  CHECK(s.per_case.at("absence").count == 1);
  CHECK(s.per_case.at("convergence").percentage == 25.0);
  CHECK(s.per_case.at("divergence").percentage == 50.0);
  CHECK(s.per_case.at("divergence").mean_loc == 400.0);
  CHECK(s.per_case.at("divergence").mean_nodes == 3.0);
  CHECK(s.per_case.at("absence").mean_loc == 50.0);

  REQUIRE(s.divergence_histogram.size() == 2);
  CHECK(s.divergence_histogram.at(2) == 1); // b: 2 extras
  CHECK(s.divergence_histogram.at(3) == 1); // c: 3 extras
  CHECK(s.mean_extra_sources == 1.5);
  CHECK(s.mean_extra_sinks == 1.0);
}

TEST_CASE("aggregate over an empty corpus stays well-defined") {
  CorpusSummary s = aggregate({}, {}, {});
  CHECK(s.classified == 0);
  CHECK(s.per_case.at("convergence").count == 0);
  CHECK(s.per_case.at("convergence").percentage == 0.0);
  CHECK(s.divergence_histogram.empty());
  CHECK(s.mean_extra_sources == 0.0);
}

TEST_CASE("case names render stably") {
  CHECK(to_string(ConformanceCase::Convergence) == "convergence");
  CHECK(to_string(ConformanceCase::Divergence) == "divergence");
  CHECK(to_string(ConformanceCase::Absence) == "absence");
}
