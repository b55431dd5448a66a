#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "redflow/package.hpp"
#include "redflow/report.hpp"

using namespace redflow;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(REDFLOW_FIXTURES) / "corpus";

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "redflow-package-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

NodePackage minimal_package(const fs::path& dir, const std::string& name) {
  write_file(dir / "package.json",
             "{\"name\": \"" + name + "\", \"version\": \"0.1.0\", "
             "\"node-red\": {\"nodes\": {\"n\": \"n.js\"}}}");
  write_file(dir / "n.html",
             "<script>RED.nodes.registerType('" + name +
                 "', {inputs: 1, outputs: 1});</script>");
  write_file(dir / "n.js", "module.exports = function(RED) {};\n");
  return load_package(dir);
}

} // namespace

TEST_CASE("load_package accepts an unpacked node package") {
  NodePackage pkg = load_package(kCorpus / "lower-case");
  CHECK(pkg.validity == Validity::Valid);
  CHECK(pkg.id.name == "lower-case");
  CHECK(pkg.id.version == "1.0.0");
  CHECK(pkg.id.str() == "lower-case@1.0.0");
  CHECK(pkg.node_count == 1);
  REQUIRE(pkg.specs.size() == 1);
  CHECK(pkg.specs[0].inputs == 1);
  CHECK(pkg.specs[0].outputs == 1);
  bool saw_manifest = false;
  for (const auto& [rel, size] : pkg.files) saw_manifest = saw_manifest || rel == "package.json";
  CHECK(saw_manifest);
}

TEST_CASE("load_package extracts tarballs into the work directory") {
  fs::path work = fresh_dir("tar-work");
  NodePackage pkg = load_package(kCorpus / "tar-wrapped.tgz", work);
  CHECK(pkg.validity == Validity::Valid);
  CHECK(pkg.root == work);
  CHECK(fs::exists(work / "package.json"));
}

TEST_CASE("load_package classifies broken downloads by file stem") {
  NodePackage pkg = load_package(kCorpus / "broken-tarball.tgz", fresh_dir("broken"));
  CHECK(pkg.validity == Validity::BrokenDownload);
  CHECK(pkg.id.name == "broken-tarball");
  CHECK_FALSE(pkg.warnings.empty());
  NodePackage missing = load_package(kCorpus / "does-not-exist");
  CHECK(missing.validity == Validity::BrokenDownload);
}

TEST_CASE("packages without node entries are no-nodes") {
  NodePackage pkg = load_package(kCorpus / "theme-pack");
  CHECK(pkg.validity == Validity::NoNodes);
}

TEST_CASE("specs that resist parsing make the package unparsable-spec") {
  NodePackage pkg = load_package(kCorpus / "mystery-spec");
  CHECK(pkg.validity == Validity::UnparsableSpec);
  CHECK(pkg.node_count >= 1); // the registration exists, its ports do not parse
  for (const NodeSpec& s : pkg.specs) CHECK_FALSE(s.parsable);
}

TEST_CASE("manifest problems surface as unparsable-spec with warnings") {
  fs::path dir = fresh_dir("nomanifest");
  write_file(dir / "readme.txt", "no manifest here");
  NodePackage pkg = load_package(dir);
  CHECK(pkg.validity == Validity::UnparsableSpec);
  REQUIRE_FALSE(pkg.warnings.empty());
  CHECK(pkg.warnings[0].message.find("manifest missing") != std::string::npos);

  fs::path dir2 = fresh_dir("badjson");
  write_file(dir2 / "package.json", "{not json");
  NodePackage pkg2 = load_package(dir2);
  CHECK(pkg2.validity == Validity::UnparsableSpec);
  CHECK(pkg2.warnings[0].message.find("not valid JSON") != std::string::npos);
}

TEST_CASE("bundled dependencies and vcs internals are not inventoried for analysis") {
  fs::path dir = fresh_dir("skiptrees");
  minimal_package(dir, "skip-trees");
  write_file(dir / "node_modules/dep/index.js", "var password = x;\nconsole.log(password);\n");
  write_file(dir / ".git/hooks/sample.js", "var secret = 1;\n");
  NodePackage pkg = load_package(dir);
  REQUIRE(pkg.validity == Validity::Valid);
  LocStats loc = count_loc(pkg);
  // only the package's own js/html count
  CHECK(loc.per_extension.at("js") == 1);
  AnalysisResult analysis = analyze_package(pkg, default_catalog());
  CHECK(analysis.flows.empty());
}

TEST_CASE("count_loc counts non-empty lines per extension") {
  fs::path dir = fresh_dir("loc");
  write_file(dir / "package.json",
             "{\"name\": \"loc\", \"version\": \"1.0.0\", "
             "\"node-red\": {\"nodes\": {\"n\": \"a.js\"}}}");
  write_file(dir / "a.js", "var a = 1;\n\n  \nvar b = 2;\n");
  write_file(dir / "n.html", "<script>RED.nodes.registerType('n', {inputs: 1, outputs: 0});\n"
                             "</script>\n");
  write_file(dir / "types.ts", "const x: number = 1;\n");
  write_file(dir / "notes.md", "ignored\nlines\n");
  NodePackage pkg = load_package(dir);
  LocStats loc = count_loc(pkg);
  CHECK(loc.per_extension.at("js") == 2);
  CHECK(loc.per_extension.at("html") == 2);
  CHECK(loc.per_extension.at("ts") == 1);
  CHECK(loc.total_loc == 5);
}

TEST_CASE("analyze_package walks js, ts, and embedded html regions") {
  NodePackage pkg = load_package(kCorpus / "ts-env-node");
  REQUIRE(pkg.validity == Validity::Valid);
  AnalysisResult analysis = analyze_package(pkg, default_catalog());
  CHECK_FALSE(analysis.flows.empty());
  bool ts_flow = false;
  for (const TaintFlow& f : analysis.flows)
    ts_flow = ts_flow || f.sink.file.ends_with(".ts");
  CHECK(ts_flow);
  CHECK(analysis.package == pkg.id.str());
}

TEST_CASE("valid_package_name accepts plain and scoped names only") {
  CHECK(valid_package_name("node-red-contrib-x"));
  CHECK(valid_package_name("@scope/name"));
  CHECK_FALSE(valid_package_name(""));
  CHECK_FALSE(valid_package_name("has space"));
  CHECK_FALSE(valid_package_name("a/b"));
  CHECK_FALSE(valid_package_name("@scope/a/b"));
  CHECK_FALSE(valid_package_name("back\\slash"));
}

namespace {

NodePackage stub_package(const std::string& name, std::optional<long long> downloads) {
  NodePackage p;
  p.id.name = name;
  p.id.version = "1.0.0";
  p.weekly_downloads = downloads;
  p.validity = Validity::Valid;
  return p;
}

} // namespace

TEST_CASE("sample_packages top strategy orders by downloads then name") {
  std::vector<NodePackage> corpus;
  corpus.push_back(stub_package("delta", 10));
  corpus.push_back(stub_package("alpha", 500));
  corpus.push_back(stub_package("bravo", 500));
  corpus.push_back(stub_package("charlie", std::nullopt)); // absent counts sort last
  auto top = sample_packages(corpus, 3, SampleStrategy::TopDownloads, 1);
  REQUIRE(top.size() == 3);
  CHECK(top[0].name == "alpha");
  CHECK(top[1].name == "bravo");
  CHECK(top[2].name == "delta");
}

TEST_CASE("sample_packages random strategy is deterministic per seed") {
  std::vector<NodePackage> corpus;
  for (int i = 0; i < 20; ++i)
    corpus.push_back(stub_package("pkg-" + std::to_string(i), 100 - i));
  auto a = sample_packages(corpus, 7, SampleStrategy::UniformRandom, 42);
  auto b = sample_packages(corpus, 7, SampleStrategy::UniformRandom, 42);
  CHECK(a == b);
  auto c = sample_packages(corpus, 7, SampleStrategy::UniformRandom, 43);
  CHECK(a != c); // overwhelmingly likely with 20 choose 7
  std::set<std::string> names;
  for (const PackageId& id : a) names.insert(id.name);
  CHECK(names.size() == 7);
}

TEST_CASE("sample_packages half strategy takes top half plus a random rest") {
  std::vector<NodePackage> corpus;
  for (int i = 0; i < 10; ++i)
    corpus.push_back(stub_package("pkg-" + std::to_string(i), 100 - i));
  auto picked = sample_packages(corpus, 6, SampleStrategy::HalfHalf, 7);
  REQUIRE(picked.size() == 6);
  // the top three by downloads are always present
  std::set<std::string> names;
  for (const PackageId& id : picked) names.insert(id.name);
  CHECK(names.count("pkg-0"));
  CHECK(names.count("pkg-1"));
  CHECK(names.count("pkg-2"));
  CHECK(names.size() == 6);
}

TEST_CASE("sample_packages rejects oversized requests") {
  std::vector<NodePackage> corpus;
  corpus.push_back(stub_package("only", 1));
  CHECK_THROWS_AS(sample_packages(corpus, 2, SampleStrategy::TopDownloads, 1),
                  std::invalid_argument);
}
