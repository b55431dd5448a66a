// Command-line front end. Subcommands:
//   scan    analyze local package directories or tarballs
//   corpus  analyze a directory of packages, with optional sampling
//   fetch   download packages from a registry into a corpus directory
//   report  verify a JSON report's summary or convert it to CSV
//
// Exit codes: 0 clean, 1 finished with per-package failures or a failed
// verification, 2 configuration or usage errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "redflow/pipeline.hpp"
#include "redflow/redflow.hpp"
#include "redflow/registry.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::string catalog_path;
  std::string out_path;
  std::string format = "json";
  int jobs = 1;
  bool count_syntactic = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--catalog", o.catalog_path, "Endpoint catalog JSON (default: built-in)");
  cmd->add_option("--out", o.out_path, "Write the report here instead of stdout");
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 256))
      ->capture_default_str();
  cmd->add_flag("--count-syntactic", o.count_syntactic,
                "Count all catalog matches instead of flow-participating endpoints");
}

redflow::Catalog load_catalog_or_exit(const std::string& path) {
  try {
    if (path.empty())
      return redflow::parse_catalog(redflow::default_catalog_text(), "built-in");
    return redflow::load_catalog(path);
  } catch (const redflow::CatalogError& e) {
    std::cerr << "catalog error: " << e.what() << "\n";
    for (const redflow::Diagnostic& d : e.details) std::cerr << "  " << d.message << "\n";
    std::exit(2);
  } catch (const std::exception& e) {
    std::cerr << "catalog error: " << e.what() << "\n";
    std::exit(2);
  }
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

// Every failure becomes a record; a scan never aborts on one package.
redflow::PackageRecord process_package(const fs::path& path, const redflow::Catalog& catalog,
                                       bool count_syntactic, const fs::path& work_dir) {
  try {
    redflow::NodePackage pkg = redflow::load_package(path, work_dir);
    if (pkg.validity != redflow::Validity::Valid) return redflow::make_invalid_record(pkg);
    redflow::AnalysisResult analysis = redflow::analyze_package(pkg, catalog);
    return redflow::make_record(pkg, analysis, count_syntactic);
  } catch (const std::exception& e) {
    redflow::PackageRecord rec;
    rec.id.name = path.filename().string();
    rec.id.version = "unknown";
    rec.validity = redflow::Validity::BrokenDownload;
    rec.diagnostics.push_back(
        {redflow::DiagLevel::Error, path.string(), 0, std::string("load failed: ") + e.what()});
    return rec;
  }
}

bool has_failures(const std::vector<redflow::PackageRecord>& records) {
  for (const auto& r : records)
    if (r.validity == redflow::Validity::BrokenDownload) return true;
  return false;
}

fs::path scratch_dir() {
  fs::path base = fs::temp_directory_path() / "redflow-work";
  std::error_code ec;
  fs::create_directories(base, ec);
  return base;
}

int run_scan(const std::vector<std::string>& paths, const CommonOpts& opts) {
  redflow::Catalog catalog = load_catalog_or_exit(opts.catalog_path);
  fs::path work = scratch_dir();

  std::vector<fs::path> inputs(paths.begin(), paths.end());
  std::vector<size_t> indices(inputs.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::vector<redflow::PackageRecord> records =
      redflow::parallel_map(indices, opts.jobs, [&](size_t i) {
        return process_package(inputs[i], catalog, opts.count_syntactic,
                               work / ("scan-" + std::to_string(i)));
      });

  std::string text = redflow::render_report(records, catalog.version, opts.format);
  int rc = emit(text, opts.out_path);
  if (rc != 0) return rc;
  return has_failures(records) ? 1 : 0;
}

std::vector<fs::path> corpus_candidates(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    fs::path p = entry.path();
    std::string name = p.filename().string();
    if (name.empty() || name[0] == '.') continue;
    if (entry.is_directory()) {
      out.push_back(p);
    } else if (entry.is_regular_file()) {
      if (name.size() > 4 && name.ends_with(".tgz")) out.push_back(p);
      else if (name.size() > 7 && name.ends_with(".tar.gz")) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_corpus(const std::string& dir, const CommonOpts& opts, int max_packages,
               std::uint32_t seed, const std::string& sample) {
  if (!fs::is_directory(dir)) {
    std::cerr << "corpus directory not found: " << dir << "\n";
    return 2;
  }
  redflow::Catalog catalog = load_catalog_or_exit(opts.catalog_path);
  fs::path work = scratch_dir();
  std::vector<fs::path> candidates = corpus_candidates(dir);
  if (candidates.empty()) {
    std::cerr << "no packages under " << dir << "\n";
    return 2;
  }

  // Sidecar written by `fetch`; maps package name to weekly download count.
  std::map<std::string, long long> downloads;
  {
    std::ifstream in(fs::path(dir) / "downloads.json");
    if (in) {
      try {
        nlohmann::json j = nlohmann::json::parse(in);
        for (auto& [k, v] : j.items())
          if (v.is_number()) downloads[k] = v.get<long long>();
      } catch (const nlohmann::json::exception&) {
        std::cerr << "warning: downloads.json is not valid JSON; ignoring\n";
      }
    }
  }

  std::vector<size_t> indices(candidates.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::vector<redflow::NodePackage> loaded =
      redflow::parallel_map(indices, opts.jobs, [&](size_t i) {
        try {
          return redflow::load_package(candidates[i], work / ("corpus-" + std::to_string(i)));
        } catch (const std::exception& e) {
          redflow::NodePackage broken;
          broken.id.name = candidates[i].filename().string();
          broken.id.version = "unknown";
          broken.validity = redflow::Validity::BrokenDownload;
          broken.warnings.push_back({redflow::DiagLevel::Error, candidates[i].string(), 0,
                                     std::string("load failed: ") + e.what()});
          return broken;
        }
      });
  for (auto& pkg : loaded) {
    auto it = downloads.find(pkg.id.name);
    if (it != downloads.end()) pkg.weekly_downloads = it->second;
  }

  // Sampling keeps a subset by id; everything else is dropped before analysis.
  if (max_packages > 0 && static_cast<size_t>(max_packages) < loaded.size()) {
    redflow::SampleStrategy strategy = redflow::SampleStrategy::TopDownloads;
    if (sample == "random") strategy = redflow::SampleStrategy::UniformRandom;
    else if (sample == "half") strategy = redflow::SampleStrategy::HalfHalf;
    std::vector<redflow::PackageId> keep = redflow::sample_packages(
        loaded, static_cast<size_t>(max_packages), strategy, seed);
    std::set<redflow::PackageId> keep_set(keep.begin(), keep.end());
    std::vector<redflow::NodePackage> subset;
    for (auto& pkg : loaded)
      if (keep_set.count(pkg.id)) subset.push_back(std::move(pkg));
    loaded = std::move(subset);
  }

  std::vector<size_t> work_idx(loaded.size());
  for (size_t i = 0; i < work_idx.size(); ++i) work_idx[i] = i;
  std::vector<redflow::PackageRecord> records =
      redflow::parallel_map(work_idx, opts.jobs, [&](size_t i) {
        const redflow::NodePackage& pkg = loaded[i];
        if (pkg.validity != redflow::Validity::Valid) return redflow::make_invalid_record(pkg);
        try {
          redflow::AnalysisResult analysis = redflow::analyze_package(pkg, catalog);
          return redflow::make_record(pkg, analysis, opts.count_syntactic);
        } catch (const std::exception& e) {
          redflow::PackageRecord rec = redflow::make_invalid_record(pkg);
          rec.validity = redflow::Validity::BrokenDownload;
          rec.diagnostics.push_back({redflow::DiagLevel::Error, pkg.id.str(), 0,
                                     std::string("analysis failed: ") + e.what()});
          return rec;
        }
      });

  std::string text = redflow::render_report(records, catalog.version, opts.format);
  int rc = emit(text, opts.out_path);
  if (rc != 0) return rc;
  return has_failures(records) ? 1 : 0;
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (c == '/' ) out += "__";
    else if (c == '@') out += "";
    else out += c;
  }
  return out;
}

int run_fetch(const std::vector<std::string>& ids_args, std::string registry,
              const std::string& out_dir, int max_packages) {
  if (registry.empty()) {
    if (const char* env = std::getenv("REDFLOW_REGISTRY")) registry = env;
    else registry = "https://registry.npmjs.org";
  }
  std::vector<redflow::PackageId> ids;
  for (const std::string& arg : ids_args) {
    if (fs::is_regular_file(arg)) {
      std::ifstream in(arg, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      for (auto& id : redflow::parse_id_list(buf.str())) ids.push_back(std::move(id));
    } else {
      for (auto& id : redflow::parse_id_list(arg)) ids.push_back(std::move(id));
    }
  }
  if (ids.empty()) {
    std::cerr << "no package ids given\n";
    return 2;
  }
  if (max_packages > 0 && static_cast<size_t>(max_packages) < ids.size())
    ids.resize(static_cast<size_t>(max_packages));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) {
    std::cerr << "cannot create output directory " << out_dir << "\n";
    return 2;
  }

  // Merge with any existing sidecar so incremental fetches accumulate.
  nlohmann::json downloads = nlohmann::json::object();
  {
    std::ifstream in(fs::path(out_dir) / "downloads.json");
    if (in) {
      try {
        downloads = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception&) {
        downloads = nlohmann::json::object();
      }
    }
  }

  int failures = 0;
  for (const redflow::PackageId& id : ids) {
    try {
      redflow::FetchedPackage got = redflow::fetch_package(id, registry);
      std::string fname = sanitize_filename(id.name) + "-" + got.resolved_version + ".tgz";
      fs::path dest = fs::path(out_dir) / fname;
      std::ofstream out(dest, std::ios::binary);
      out.write(got.bytes.data(), static_cast<std::streamsize>(got.bytes.size()));
      if (!out) {
        std::cerr << id.name << ": cannot write " << dest.string() << "\n";
        ++failures;
        continue;
      }
      if (got.metadata.weekly_downloads)
        downloads[id.name] = *got.metadata.weekly_downloads;
      std::cout << id.name << "@" << got.resolved_version << " -> " << dest.string() << "\n";
    } catch (const redflow::FetchError& e) {
      const char* kind = e.kind == redflow::FetchError::Kind::NotFound    ? "not found"
                         : e.kind == redflow::FetchError::Kind::Network   ? "network"
                         : e.kind == redflow::FetchError::Kind::Integrity ? "integrity"
                                                                          : "protocol";
      std::cerr << id.name << ": " << kind << " failure: " << e.what() << "\n";
      ++failures;
    } catch (const std::exception& e) {
      std::cerr << id.name << ": " << e.what() << "\n";
      ++failures;
    }
  }

  std::ofstream side(fs::path(out_dir) / "downloads.json", std::ios::binary);
  side << downloads.dump(2) << "\n";
  return failures > 0 ? 1 : 0;
}

std::optional<redflow::Validity> validity_from(const std::string& s) {
  using V = redflow::Validity;
  for (V v : {V::Valid, V::BrokenDownload, V::NoNodes, V::UnparsableSpec})
    if (s == redflow::to_string(v)) return v;
  return std::nullopt;
}

// Rebuilds PackageRecords from a report's package array. Findings are
// reclassified from flow data, which the severity model fully determines.
std::optional<std::vector<redflow::PackageRecord>> records_from_json(const ordered_json& doc) {
  if (!doc.contains("packages") || !doc["packages"].is_array()) return std::nullopt;
  std::vector<redflow::PackageRecord> records;
  for (const auto& p : doc["packages"]) {
    redflow::PackageRecord rec;
    rec.id.name = p.value("name", "");
    rec.id.version = p.value("version", "");
    auto v = validity_from(p.value("validity", ""));
    if (!v) return std::nullopt;
    rec.validity = *v;
    if (p.contains("weekly_downloads") && p["weekly_downloads"].is_number())
      rec.weekly_downloads = p["weekly_downloads"].get<long long>();
    rec.node_count = p.value("node_count", 0);
    if (p.contains("loc") && p["loc"].is_object()) {
      rec.loc.total_loc = p["loc"].value("total", 0);
      for (auto& [k, val] : p["loc"].items())
        if (k != "total" && val.is_number()) rec.loc.per_extension[k] = val.get<int>();
    }
    if (p.contains("spec") && p["spec"].is_object()) {
      const auto& s = p["spec"];
      rec.totals.s_in = s.value("inputs", 0);
      rec.totals.s_out = s.value("outputs", 0);
      rec.totals.unparsable_nodes = s.value("unparsable_nodes", 0);
      if (s.contains("nodes"))
        for (const auto& n : s["nodes"])
          rec.specs.push_back({n.value("name", ""), n.value("inputs", 0), n.value("outputs", 0),
                               n.value("parsable", true), n.value("file", ""),
                               n.value("line", 0)});
    }
    if (rec.validity == redflow::Validity::Valid) {
      if (!p.contains("conformance") || !p["conformance"].is_object()) return std::nullopt;
      rec.conf.package = rec.id.str();
      rec.conf.s_in = rec.totals.s_in;
      rec.conf.s_out = rec.totals.s_out;
      rec.conf.d_src = p["detected"].value("sources", 0);
      rec.conf.d_snk = p["detected"].value("sinks", 0);
      rec.conf.conformance_case =
          redflow::classify(rec.conf.s_in, rec.conf.s_out, rec.conf.d_src, rec.conf.d_snk);
      rec.conf.extra_src = std::max(0, rec.conf.d_src - rec.conf.s_in);
      rec.conf.extra_snk = std::max(0, rec.conf.d_snk - rec.conf.s_out);
      rec.conf.unparsable_nodes = rec.totals.unparsable_nodes;
      rec.counted_syntactic = p["conformance"].value("counted_syntactic", false);
      if (p.contains("flows"))
        for (const auto& fj : p["flows"]) {
          redflow::TaintFlow flow;
          flow.source.kind = redflow::EndpointKind::Source;
          flow.source.entry_id = fj["source"].value("entry", "");
          flow.source.file = fj["source"].value("file", "");
          flow.source.line = fj["source"].value("line", 0);
          flow.source.symbol = fj["source"].value("symbol", "");
          auto dc = redflow::data_class_from(fj["source"].value("data_class", ""));
          if (!dc) return std::nullopt;
          flow.source.data_class = *dc;
          flow.data_class = *dc;
          flow.sink.kind = redflow::EndpointKind::Sink;
          flow.sink.entry_id = fj["sink"].value("entry", "");
          flow.sink.file = fj["sink"].value("file", "");
          flow.sink.line = fj["sink"].value("line", 0);
          flow.sink.symbol = fj["sink"].value("symbol", "");
          auto sc = redflow::sink_category_from(fj["sink"].value("category", ""));
          if (!sc) return std::nullopt;
          flow.sink.sink_category = *sc;
          if (fj.contains("trace"))
            for (const auto& t : fj["trace"])
              flow.steps.push_back({t.value("file", ""), t.value("line", 0), t.value("note", "")});
          rec.flows.push_back(flow);
          rec.findings.push_back(redflow::classify_flow(rec.flows.back()));
        }
    }
    if (p.contains("diagnostics"))
      for (const auto& d : p["diagnostics"]) {
        redflow::DiagLevel level = redflow::DiagLevel::Warning;
        std::string ls = d.value("level", "warning");
        if (ls == "info") level = redflow::DiagLevel::Info;
        else if (ls == "error") level = redflow::DiagLevel::Error;
        rec.diagnostics.push_back({level, d.value("file", ""), d.value("line", 0),
                                   d.value("message", "")});
      }
    rec.truncated = p.value("truncated", false);
    records.push_back(std::move(rec));
  }
  return records;
}

int run_report(const std::string& path, const std::string& format, const std::string& out_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 2;
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "not a JSON report: " << e.what() << "\n";
    return 2;
  }
  if (doc.value("schema_version", 0) != redflow::kReportSchemaVersion) {
    std::cerr << "unsupported schema_version\n";
    return 2;
  }
  auto records = records_from_json(doc);
  if (!records) {
    std::cerr << "report is missing required fields\n";
    return 2;
  }

  if (format == "csv") return emit(redflow::report_csv(*records), out_path);

  // JSON mode re-derives the summary and compares it with the embedded one.
  ordered_json recomputed = redflow::summary_json(*records);
  if (!doc.contains("summary") || doc["summary"] != recomputed) {
    std::cerr << "summary mismatch: embedded summary does not match the records\n";
    std::cerr << "recomputed:\n" << recomputed.dump(2) << "\n";
    return 1;
  }
  std::cout << "summary verified: " << (*records).size() << " package records\n";
  if (!out_path.empty())
    return emit(redflow::report_json(*records, doc.value("catalog_version", "unknown")).dump(2) +
                    "\n",
                out_path);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"redflow: declared-port conformance analysis for Node-RED packages"};
  app.require_subcommand(1);

  CommonOpts scan_opts;
  std::vector<std::string> scan_paths;
  CLI::App* scan = app.add_subcommand("scan", "Analyze package directories or tarballs");
  scan->add_option("paths", scan_paths, "Package directories or .tgz archives")->required();
  add_common(scan, scan_opts);

  CommonOpts corpus_opts;
  std::string corpus_dir;
  int max_packages = 0;
  std::uint32_t seed = 1;
  std::string sample = "top";
  CLI::App* corpus = app.add_subcommand("corpus", "Analyze every package under a directory");
  corpus->add_option("dir", corpus_dir, "Corpus directory")->required();
  add_common(corpus, corpus_opts);
  corpus->add_option("--max-packages", max_packages, "Sample down to at most N packages");
  corpus->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  corpus->add_option("--sample", sample, "Sampling strategy")
      ->check(CLI::IsMember({"top", "random", "half"}))
      ->capture_default_str();

  std::vector<std::string> fetch_ids;
  std::string registry;
  std::string fetch_out = "packages";
  int fetch_max = 0;
  CLI::App* fetch = app.add_subcommand("fetch", "Download packages from a registry");
  fetch->add_option("ids", fetch_ids, "Package ids (name or name@version) or an id-list file")
      ->required();
  fetch->add_option("--registry", registry,
                    "Registry base URL (default: $REDFLOW_REGISTRY or registry.npmjs.org)");
  fetch->add_option("--out", fetch_out, "Directory for tarballs")->capture_default_str();
  fetch->add_option("--max-packages", fetch_max, "Fetch at most N ids");

  std::string report_path, report_format = "json", report_out;
  CLI::App* report = app.add_subcommand("report", "Verify or convert an existing JSON report");
  report->add_option("report", report_path, "Report JSON produced by scan or corpus")->required();
  report->add_option("--format", report_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  report->add_option("--out", report_out, "Write converted output here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (scan->parsed()) return run_scan(scan_paths, scan_opts);
    if (corpus->parsed())
      return run_corpus(corpus_dir, corpus_opts, max_packages, seed, sample);
    if (fetch->parsed()) return run_fetch(fetch_ids, registry, fetch_out, fetch_max);
    if (report->parsed()) return run_report(report_path, report_format, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
