#pragma once

// Registry protocol client. GET <base>/<name> returns package metadata with
// per-version tarball URLs; GET of a tarball URL returns gzip tarball bytes.
// Checksums are verified when the metadata supplies one. Error kinds separate
// absent packages (permanent) from transport failures (retryable) and
// integrity mismatches.

#include <openssl/evp.h>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "redflow/package.hpp"

namespace redflow {

struct FetchError : std::runtime_error {
  enum class Kind { NotFound, Network, Integrity, Protocol };
  Kind kind;
  FetchError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

struct VersionDist {
  std::string tarball_url;
  std::string shasum; // hex sha1, may be empty
};

struct RegistryMetadata {
  std::string name;
  std::string latest_version;
  std::map<std::string, VersionDist> versions;
  std::optional<long long> weekly_downloads;
};

struct FetchedPackage {
  std::string bytes; // gzip tarball
  std::string resolved_version;
  RegistryMetadata metadata;
};

namespace detail_registry {

struct SplitUrl {
  std::string origin; // scheme://host[:port]
  std::string path;   // /path, at least "/"
};

inline SplitUrl split_url(const std::string& url) {
  size_t scheme = url.find("://");
  if (scheme == std::string::npos)
    throw FetchError(FetchError::Kind::Protocol, "URL lacks a scheme: " + url);
  size_t path_start = url.find('/', scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string sha1_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr)) return "";
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string http_get(const std::string& url) {
  SplitUrl parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  client.set_follow_location(true);
  httplib::Result res = client.Get(parts.path);
  if (!res)
    throw FetchError(FetchError::Kind::Network,
                     "network failure reaching " + url + ": " + httplib::to_string(res.error()));
  if (res->status == 404)
    throw FetchError(FetchError::Kind::NotFound, "not found: " + url);
  if (res->status < 200 || res->status >= 300)
    throw FetchError(FetchError::Kind::Network,
                     "HTTP " + std::to_string(res->status) + " from " + url);
  return res->body;
}

} // namespace detail_registry

inline RegistryMetadata fetch_metadata(const PackageId& id, const std::string& registry_base) {
  if (!valid_package_name(id.name))
    throw std::invalid_argument("invalid package name: '" + id.name + "'");
  std::string base = registry_base;
  while (!base.empty() && base.back() == '/') base.pop_back();
  std::string body = detail_registry::http_get(base + "/" + id.name);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw FetchError(FetchError::Kind::Protocol,
                     "metadata for " + id.name + " is not valid JSON: " + e.what());
  }
  RegistryMetadata meta;
  meta.name = doc.value("name", id.name);
  if (doc.contains("dist-tags") && doc["dist-tags"].is_object())
    meta.latest_version = doc["dist-tags"].value("latest", "");
  if (doc.contains("versions") && doc["versions"].is_object()) {
    for (auto& [version, vdoc] : doc["versions"].items()) {
      VersionDist dist;
      if (vdoc.contains("dist") && vdoc["dist"].is_object()) {
        dist.tarball_url = vdoc["dist"].value("tarball", "");
        dist.shasum = vdoc["dist"].value("shasum", "");
      }
      meta.versions[version] = std::move(dist);
    }
  }
  if (doc.contains("weekly_downloads") && doc["weekly_downloads"].is_number())
    meta.weekly_downloads = doc["weekly_downloads"].get<long long>();
  return meta;
}

// Resolves the requested version ("latest" through the dist tag), downloads
// the tarball, and verifies the checksum when the registry supplies one.
inline FetchedPackage fetch_package(const PackageId& id, const std::string& registry_base) {
  FetchedPackage out;
  out.metadata = fetch_metadata(id, registry_base);

  std::string version = id.version.empty() || id.version == "latest"
                            ? out.metadata.latest_version
                            : id.version;
  if (version.empty())
    throw FetchError(FetchError::Kind::Protocol,
                     "registry metadata for " + id.name + " names no latest version");
  auto it = out.metadata.versions.find(version);
  if (it == out.metadata.versions.end())
    throw FetchError(FetchError::Kind::NotFound,
                     id.name + "@" + version + " is not in the registry metadata");
  if (it->second.tarball_url.empty())
    throw FetchError(FetchError::Kind::Protocol,
                     id.name + "@" + version + " has no tarball URL");

  out.bytes = detail_registry::http_get(it->second.tarball_url);
  out.resolved_version = version;
  if (!it->second.shasum.empty()) {
    std::string got = detail_registry::sha1_hex(out.bytes);
    if (got != it->second.shasum)
      throw FetchError(FetchError::Kind::Integrity,
                       "checksum mismatch for " + id.name + "@" + version + ": expected " +
                           it->second.shasum + ", got " + got);
  }
  return out;
}

// Newline-delimited id list: "name" or "name@version" per line; blank lines
// and '#' comments are skipped. Scoped names keep their leading '@'.
inline std::vector<PackageId> parse_id_list(const std::string& text) {
  std::vector<PackageId> ids;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line.empty() || line[0] == '#') continue;
    PackageId id;
    size_t at = line.rfind('@');
    if (at != std::string::npos && at > 0) {
      id.name = line.substr(0, at);
      id.version = line.substr(at + 1);
    } else {
      id.name = line;
      id.version = "latest";
    }
    ids.push_back(std::move(id));
  }
  return ids;
}

} // namespace redflow
