#include <catch2/catch_amalgamated.hpp>

#include "redflow/html.hpp"
#include "redflow/spec_parser.hpp"

using namespace redflow;

TEST_CASE("extract_scripts returns regions with positions and types") {
  std::string html =
      "<p>intro</p>\n"
      "<script type=\"text/javascript\">\n"
      "var a = 1;\n"
      "</script>\n"
      "<script type=\"text/html\" data-template-name=\"x\">\n"
      "<div></div>\n"
      "</script>\n";
  auto regions = extract_scripts(html);
  REQUIRE(regions.size() == 2);
  CHECK(regions[0].type == "text/javascript");
  CHECK(regions[0].line == 2); // body starts right after the opening tag
  CHECK(regions[0].text.find("var a = 1;") != std::string::npos);
  CHECK(regions[1].type == "text/html");
}

TEST_CASE("extract_js_scripts filters to executable regions") {
  std::string html =
      "<script type=\"text/html\">template</script>"
      "<script>bare</script>"
      "<script type=\"application/javascript\">app</script>"
      "<script type=\"module\">mod</script>"
      "<script type=\"text/x-red\">red-template</script>";
  auto regions = extract_js_scripts(html);
  REQUIRE(regions.size() == 3);
  CHECK(regions[0].text == "bare");
  CHECK(regions[1].text == "app");
  CHECK(regions[2].text == "mod");
}

TEST_CASE("script tag parsing survives case and attribute noise") {
  std::string html =
      "<SCRIPT TYPE='Text/JavaScript' defer data-x=\"1\">code()</SCRIPT>";
  auto regions = extract_js_scripts(html);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].text == "code()");
  // <scriptsomething> is not a script tag
  CHECK(extract_scripts("<scriptx>nope</scriptx>").empty());
}

TEST_CASE("unclosed script region extends to end of file") {
  auto regions = extract_scripts("<script>var x = 1;");
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].text == "var x = 1;");
}

namespace {

std::vector<RawRegistration> regs_of(const std::string& html,
                                     std::vector<Diagnostic>* warn = nullptr) {
  return extract_registrations(html, "node.html", warn);
}

NodeSpec spec_of(const std::string& html, std::vector<Diagnostic>* warn = nullptr) {
  auto regs = regs_of(html, warn);
  REQUIRE(regs.size() == 1);
  return parse_port_counts(regs[0], warn);
}

} // namespace

TEST_CASE("registration capture finds the node name and object") {
  std::string html =
      "<script type=\"text/javascript\">\n"
      "RED.nodes.registerType('my-node', {\n"
      "  category: 'output', inputs: 1, outputs: 2\n"
      "});\n"
      "</script>\n";
  auto regs = regs_of(html);
  REQUIRE(regs.size() == 1);
  CHECK(regs[0].node_name == "my-node");
  CHECK(regs[0].line == 2);
  CHECK(regs[0].properties_text.front() == '{');
  CHECK(regs[0].properties_text.back() == '}');
  NodeSpec spec = parse_port_counts(regs[0]);
  CHECK(spec.inputs == 1);
  CHECK(spec.outputs == 2);
  CHECK(spec.parsable);
}

TEST_CASE("registration resolves an identifier config object") {
  std::string html =
      "<script>\n"
      "var cfg = { inputs: 1, outputs: 1, icon: 'x.png' };\n"
      "RED.nodes.registerType(\"ident-node\", cfg);\n"
      "</script>";
  NodeSpec spec = spec_of(html);
  CHECK(spec.node_name == "ident-node");
  CHECK(spec.inputs == 1);
  CHECK(spec.outputs == 1);
}

TEST_CASE("unresolvable config object warns and is unparsable") {
  std::string html = "<script>RED.nodes.registerType('n', makeCfg());</script>";
  std::vector<Diagnostic> warn;
  NodeSpec spec = spec_of(html, &warn);
  CHECK_FALSE(spec.parsable);
  REQUIRE_FALSE(warn.empty());
  CHECK(warn[0].message.find("could not capture") != std::string::npos);
}

TEST_CASE("port counts accept quoted keys and skip nested objects") {
  std::string html =
      "<script>RED.nodes.registerType('q', {\n"
      "  defaults: { inputs: { value: 9 } },\n"
      "  \"inputs\": 1,\n"
      "  'outputs': 3\n"
      "});</script>";
  NodeSpec spec = spec_of(html);
  CHECK(spec.inputs == 1);
  CHECK(spec.outputs == 3);
  CHECK(spec.parsable);
}

TEST_CASE("missing ports default to zero with one warning each") {
  std::vector<Diagnostic> warn;
  NodeSpec spec = spec_of("<script>RED.nodes.registerType('m', {category: 'x'});</script>",
                          &warn);
  CHECK(spec.inputs == 0);
  CHECK(spec.outputs == 0);
  CHECK(spec.parsable);
  REQUIRE(warn.size() == 2);
  CHECK(warn[0].message.find("omits inputs") != std::string::npos);
  CHECK(warn[1].message.find("omits outputs") != std::string::npos);
}

TEST_CASE("inputs above one clamp to one and warn") {
  std::vector<Diagnostic> warn;
  NodeSpec spec = spec_of(
      "<script>RED.nodes.registerType('c', {inputs: 3, outputs: 2});</script>", &warn);
  CHECK(spec.inputs == 1);
  CHECK(spec.outputs == 2);
  REQUIRE(warn.size() == 1);
  CHECK(warn[0].message.find("clamped") != std::string::npos);
}

TEST_CASE("non-literal port values make the spec unparsable") {
  for (const char* v : {"opts.n", "1 + 1", "'2'", "-1", "count()"}) {
    std::string html = std::string("<script>RED.nodes.registerType('n', {inputs: ") + v +
                       ", outputs: 1});</script>";
    NodeSpec spec = spec_of(html);
    INFO("value " << v);
    CHECK_FALSE(spec.parsable);
  }
}

TEST_CASE("comments and strings inside the object do not confuse capture") {
  std::string html =
      "<script>RED.nodes.registerType('t', {\n"
      "  // outputs: 9 in a comment\n"
      "  label: 'has } brace and , comma',\n"
      "  inputs: 1, /* inputs: 7 */ outputs: 2\n"
      "});</script>";
  NodeSpec spec = spec_of(html);
  CHECK(spec.inputs == 1);
  CHECK(spec.outputs == 2);
}

TEST_CASE("multiple registrations across regions keep document order") {
  std::string html =
      "<script>RED.nodes.registerType('a', {inputs: 1, outputs: 1});</script>\n"
      "<script type=\"text/html\">registerType('ignored', {})</script>\n"
      "<script>RED.nodes.registerType('b', {inputs: 0, outputs: 2});</script>";
  auto regs = regs_of(html);
  REQUIRE(regs.size() == 2);
  CHECK(regs[0].node_name == "a");
  CHECK(regs[1].node_name == "b");
}

TEST_CASE("registration lines are absolute within the html file") {
  std::string html =
      "<div>\n<p>help</p>\n</div>\n"
      "<script type=\"text/javascript\">\n"
      "// registration below\n"
      "RED.nodes.registerType('deep', {inputs: 1, outputs: 1});\n"
      "</script>";
  auto regs = regs_of(html);
  REQUIRE(regs.size() == 1);
  CHECK(regs[0].line == 6);
}

TEST_CASE("spec_totals sums parsable specs and counts the rest") {
  std::vector<NodeSpec> specs = {
      {"a", 1, 2, true, "f", 1},
      {"b", 0, 1, true, "f", 2},
      {"c", 0, 0, false, "f", 3},
  };
  SpecTotals t = spec_totals(specs);
  CHECK(t.s_in == 1);
  CHECK(t.s_out == 3);
  CHECK(t.unparsable_nodes == 1);
}
