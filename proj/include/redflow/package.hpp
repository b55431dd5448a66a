#pragma once

// Package ingestion: unpack or read a package tree, validate it as a node
// package, inventory and measure its files, extract declared specs, run the
// analyzer over its sources, and select evaluation samples.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redflow/archive.hpp"
#include "redflow/catalog.hpp"
#include "redflow/diag.hpp"
#include "redflow/html.hpp"
#include "redflow/spec_parser.hpp"
#include "redflow/taint.hpp"
#include "redflow/ts_strip.hpp"

namespace redflow {

struct PackageId {
  std::string name;
  std::string version = "latest";

  std::string str() const { return name + "@" + version; }
  auto operator<=>(const PackageId&) const = default;
};

// Scoped names (@scope/name) carry exactly one slash; everything else none.
inline bool valid_package_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '\\') return false;
  size_t slashes = static_cast<size_t>(std::count(name.begin(), name.end(), '/'));
  if (name[0] == '@') return slashes == 1;
  return slashes == 0;
}

enum class Validity { Valid, BrokenDownload, NoNodes, UnparsableSpec };

inline std::string to_string(Validity v) {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::BrokenDownload: return "broken-download";
    case Validity::NoNodes: return "no-nodes";
    case Validity::UnparsableSpec: return "unparsable-spec";
  }
  return "?";
}

struct NodePackage {
  PackageId id;
  std::filesystem::path root;
  nlohmann::json manifest;
  std::vector<std::pair<std::string, std::uint64_t>> files; // sorted relative paths
  std::optional<long long> weekly_downloads;
  Validity validity = Validity::UnparsableSpec;
  std::vector<NodeSpec> specs;
  int node_count = 0; // registrations found across spec files
  std::vector<Diagnostic> warnings;
};

struct LocStats {
  int total_loc = 0;
  std::map<std::string, int> per_extension; // js / ts / html
};

namespace detail_pkg {

inline std::optional<std::string> read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string extension_of(const std::string& rel) {
  size_t dot = rel.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = rel.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// Bundled dependencies and VCS internals are not the package's own code.
inline bool skipped_tree(const std::string& rel) {
  return rel.rfind("node_modules/", 0) == 0 || rel.find("/node_modules/") != std::string::npos ||
         rel.rfind(".git/", 0) == 0 || rel.find("/.git/") != std::string::npos;
}

inline int count_nonempty_lines(const std::string& text) {
  int count = 0;
  bool has_content = false;
  for (char c : text) {
    if (c == '\n') {
      if (has_content) ++count;
      has_content = false;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      has_content = true;
    }
  }
  if (has_content) ++count;
  return count;
}

} // namespace detail_pkg

// Loads a package from an unpacked directory or a .tgz archive. Tarballs are
// extracted under work_dir (a unique subdirectory per package). Never throws
// for content problems: they land in validity and warnings.
inline NodePackage load_package(const std::filesystem::path& path,
                                const std::filesystem::path& work_dir = {}) {
  NodePackage pkg;
  namespace fs = std::filesystem;

  if (fs::is_regular_file(path)) {
    fs::path dest = work_dir.empty()
                        ? fs::temp_directory_path() / ("redflow-" + path.stem().string())
                        : work_dir;
    try {
      extract_tar_gz(*detail_pkg::read_text(path), dest);
    } catch (const ArchiveError& e) {
      pkg.validity = Validity::BrokenDownload;
      pkg.id.name = path.stem().string();
      pkg.warnings.push_back(make_error(path.string(), 0, e.what()));
      return pkg;
    }
    pkg.root = dest;
  } else if (fs::is_directory(path)) {
    pkg.root = path;
  } else {
    pkg.validity = Validity::BrokenDownload;
    pkg.id.name = path.filename().string();
    pkg.warnings.push_back(make_error(path.string(), 0, "path is neither directory nor file"));
    return pkg;
  }

  for (auto it = fs::recursive_directory_iterator(pkg.root);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    std::string rel = fs::relative(it->path(), pkg.root).generic_string();
    pkg.files.emplace_back(rel, static_cast<std::uint64_t>(it->file_size()));
  }
  std::sort(pkg.files.begin(), pkg.files.end());

  pkg.id.name = pkg.root.filename().string();
  pkg.id.version = "unknown";
  auto manifest_text = detail_pkg::read_text(pkg.root / "package.json");
  if (!manifest_text) {
    pkg.validity = Validity::UnparsableSpec;
    pkg.warnings.push_back(make_error("package.json", 0, "manifest missing"));
    return pkg;
  }
  try {
    pkg.manifest = nlohmann::json::parse(*manifest_text);
  } catch (const nlohmann::json::exception& e) {
    pkg.validity = Validity::UnparsableSpec;
    pkg.warnings.push_back(make_error("package.json", 0,
                                      std::string("manifest is not valid JSON: ") + e.what()));
    return pkg;
  }
  if (pkg.manifest.is_object()) {
    pkg.id.name = pkg.manifest.value("name", pkg.id.name);
    pkg.id.version = pkg.manifest.value("version", pkg.id.version);
  }

  const bool has_node_section = pkg.manifest.is_object() &&
                                pkg.manifest.contains("node-red") &&
                                pkg.manifest["node-red"].is_object() &&
                                pkg.manifest["node-red"].contains("nodes") &&
                                pkg.manifest["node-red"]["nodes"].is_object() &&
                                !pkg.manifest["node-red"]["nodes"].empty();
  if (!has_node_section) {
    pkg.validity = Validity::NoNodes;
    return pkg;
  }

  for (const auto& [rel, size] : pkg.files) {
    if (detail_pkg::skipped_tree(rel)) continue;
    if (detail_pkg::extension_of(rel) != "html") continue;
    auto text = detail_pkg::read_text(pkg.root / rel);
    if (!text) {
      pkg.warnings.push_back(make_warning(rel, 0, "unreadable spec file"));
      continue;
    }
    std::vector<RawRegistration> regs = extract_registrations(*text, rel, &pkg.warnings);
    pkg.node_count += static_cast<int>(regs.size());
    for (const RawRegistration& reg : regs)
      pkg.specs.push_back(parse_port_counts(reg, &pkg.warnings));
  }

  bool any_parsable = std::any_of(pkg.specs.begin(), pkg.specs.end(),
                                  [](const NodeSpec& s) { return s.parsable; });
  pkg.validity = (pkg.node_count > 0 && any_parsable) ? Validity::Valid
                                                      : Validity::UnparsableSpec;
  return pkg;
}

// Counts non-empty physical lines of the package's .js/.ts/.html files.
// Whitespace-only lines are excluded; unreadable files count zero and warn.
inline LocStats count_loc(const NodePackage& pkg,
                          std::vector<Diagnostic>* warnings = nullptr) {
  LocStats stats;
  stats.per_extension = {{"js", 0}, {"ts", 0}, {"html", 0}};
  for (const auto& [rel, size] : pkg.files) {
    if (detail_pkg::skipped_tree(rel)) continue;
    std::string ext = detail_pkg::extension_of(rel);
    if (ext != "js" && ext != "ts" && ext != "html") continue;
    auto text = detail_pkg::read_text(pkg.root / rel);
    if (!text) {
      if (warnings) warnings->push_back(make_warning(rel, 0, "unreadable file counts 0 lines"));
      continue;
    }
    int lines = detail_pkg::count_nonempty_lines(*text);
    stats.per_extension[ext] += lines;
    stats.total_loc += lines;
  }
  return stats;
}

struct AnalysisResult {
  std::string package; // name@version
  std::vector<TaintFlow> flows;
  std::vector<Endpoint> endpoints_syntactic;
  std::vector<Diagnostic> diagnostics;
  bool truncated = false;
};

// Analyzes every .js file, every stripped .ts file, and every script region
// embedded in .html files. Per-file results aggregate in path order; flows
// never cross files.
inline AnalysisResult analyze_package(const NodePackage& pkg, const Catalog& catalog) {
  AnalysisResult result;
  result.package = pkg.id.str();

  auto absorb = [&](FileAnalysis fa) {
    for (auto& e : fa.endpoints) result.endpoints_syntactic.push_back(std::move(e));
    for (auto& f : fa.flows) result.flows.push_back(std::move(f));
    for (auto& d : fa.diagnostics) result.diagnostics.push_back(std::move(d));
    result.truncated = result.truncated || fa.truncated;
  };

  for (const auto& [rel, size] : pkg.files) {
    if (detail_pkg::skipped_tree(rel)) continue;
    std::string ext = detail_pkg::extension_of(rel);
    if (ext != "js" && ext != "ts" && ext != "html") continue;
    auto text = detail_pkg::read_text(pkg.root / rel);
    if (!text) {
      result.diagnostics.push_back(make_warning(rel, 0, "unreadable file skipped"));
      continue;
    }
    if (ext == "js") {
      absorb(analyze_file(js::parse_js(*text, rel), catalog));
    } else if (ext == "ts") {
      absorb(analyze_file(js::parse_js(strip_types(*text), rel), catalog));
    } else {
      for (const ScriptRegion& region : extract_js_scripts(*text))
        absorb(analyze_file(js::parse_js(region.text, rel, region.line - 1), catalog));
    }
  }
  return result;
}

enum class SampleStrategy { TopDownloads, UniformRandom, HalfHalf };

// Deterministic sampling. Download ordering is by descending count with name
// ties, absent counts last; randomness is an explicit Fisher-Yates shuffle
// over the generator's raw outputs so every platform draws identically.
inline std::vector<PackageId> sample_packages(const std::vector<NodePackage>& corpus,
                                              size_t n, SampleStrategy strategy,
                                              std::uint32_t seed) {
  if (n > corpus.size())
    throw std::invalid_argument("sample size exceeds corpus size");

  std::vector<const NodePackage*> by_downloads;
  for (const NodePackage& p : corpus) by_downloads.push_back(&p);
  std::sort(by_downloads.begin(), by_downloads.end(),
            [](const NodePackage* a, const NodePackage* b) {
              bool ha = a->weekly_downloads.has_value();
              bool hb = b->weekly_downloads.has_value();
              if (ha != hb) return ha; // absent counts sort last
              if (ha && *a->weekly_downloads != *b->weekly_downloads)
                return *a->weekly_downloads > *b->weekly_downloads;
              return a->id.name < b->id.name;
            });

  auto shuffle_pick = [&](std::vector<const NodePackage*> pool, size_t count,
                          std::mt19937& gen) {
    // Fisher-Yates with explicit modulo: biased by < 2^-20 for desk-scale
    // pools and identical on every implementation
    std::sort(pool.begin(), pool.end(), [](const NodePackage* a, const NodePackage* b) {
      return a->id.name < b->id.name;
    });
    for (size_t i = pool.size(); i > 1; --i)
      std::swap(pool[i - 1], pool[gen() % i]);
    pool.resize(std::min(count, pool.size()));
    return pool;
  };

  std::vector<const NodePackage*> picked;
  std::mt19937 gen(seed);
  switch (strategy) {
    case SampleStrategy::TopDownloads:
      picked.assign(by_downloads.begin(), by_downloads.begin() + static_cast<long>(n));
      break;
    case SampleStrategy::UniformRandom:
      picked = shuffle_pick(by_downloads, n, gen);
      break;
    case SampleStrategy::HalfHalf: {
      size_t top_n = (n + 1) / 2;
      picked.assign(by_downloads.begin(), by_downloads.begin() + static_cast<long>(top_n));
      std::vector<const NodePackage*> rest(by_downloads.begin() + static_cast<long>(top_n),
                                           by_downloads.end());
      for (const NodePackage* p : shuffle_pick(std::move(rest), n - top_n, gen))
        picked.push_back(p);
      break;
    }
  }
  std::vector<PackageId> ids;
  for (const NodePackage* p : picked) ids.push_back(p->id);
  return ids;
}

} // namespace redflow
