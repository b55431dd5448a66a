#pragma once

// Gzip and ustar handling for package tarballs. Extraction sandboxes entry
// paths (absolute paths and traversal outside the extraction root are
// rejected) and strips the archive's shared leading directory, the layout
// registry tarballs use. The writer exists so tests and tools can build
// archives the extractor consumes.

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

namespace redflow {

struct ArchiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------- gzip

inline std::string gunzip(const std::string& data) {
  if (data.size() < 2) throw ArchiveError("gzip stream too short");
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK) throw ArchiveError("inflate init failed");
  std::string out;
  out.reserve(data.size() * 3);
  std::vector<char> buf(64 * 1024);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf.data());
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ArchiveError("gzip stream is corrupt");
    }
    out.append(buf.data(), buf.size() - zs.avail_out);
  } while (rc != Z_STREAM_END && zs.avail_in > 0);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ArchiveError("gzip stream is truncated");
  return out;
}

inline std::string gzip_compress(const std::string& data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK)
    throw ArchiveError("deflate init failed");
  std::string out;
  std::vector<char> buf(64 * 1024);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf.data());
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = deflate(&zs, Z_FINISH);
    out.append(buf.data(), buf.size() - zs.avail_out);
  } while (rc == Z_OK);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ArchiveError("gzip compression failed");
  return out;
}

// -------------------------------------------------------------------- tar

struct TarEntry {
  std::string path;
  std::string data;
  bool is_dir = false;
};

namespace detail_tar {

inline long long read_octal(const char* field, size_t len) {
  long long v = 0;
  for (size_t i = 0; i < len; ++i) {
    char c = field[i];
    if (c == '\0') break;
    if (c == ' ') continue;
    if (c < '0' || c > '7') break;
    v = v * 8 + (c - '0');
  }
  return v;
}

// pax extended header: records of the form "<len> key=value\n"
inline std::map<std::string, std::string> parse_pax(const std::string& block) {
  std::map<std::string, std::string> out;
  size_t pos = 0;
  while (pos < block.size()) {
    size_t sp = block.find(' ', pos);
    if (sp == std::string::npos) break;
    long long len = 0;
    try {
      len = std::stoll(block.substr(pos, sp - pos));
    } catch (...) {
      break;
    }
    if (len <= 0 || pos + static_cast<size_t>(len) > block.size()) break;
    std::string record = block.substr(sp + 1, pos + len - sp - 2); // drop trailing \n
    size_t eq = record.find('=');
    if (eq != std::string::npos) out[record.substr(0, eq)] = record.substr(eq + 1);
    pos += static_cast<size_t>(len);
  }
  return out;
}

} // namespace detail_tar

// Parses a (decompressed) ustar stream. Handles GNU long names and pax path
// overrides; ignores special entry types other than files and directories.
inline std::vector<TarEntry> parse_tar(const std::string& tar) {
  std::vector<TarEntry> entries;
  size_t pos = 0;
  std::string pending_long_name;
  std::map<std::string, std::string> pending_pax;
  while (pos + 512 <= tar.size()) {
    const char* h = tar.data() + pos;
    bool all_zero = true;
    for (int i = 0; i < 512 && all_zero; ++i) all_zero = h[i] == '\0';
    if (all_zero) break;

    std::string name(h, strnlen(h, 100));
    std::string prefix(h + 345, strnlen(h + 345, 155));
    long long size = detail_tar::read_octal(h + 124, 12);
    char type = h[156];
    if (size < 0 || pos + 512 + static_cast<size_t>(size) > tar.size())
      throw ArchiveError("archive entry overruns the stream");
    size_t data_start = pos + 512;
    size_t padded = (static_cast<size_t>(size) + 511) / 512 * 512;
    pos = data_start + padded;

    if (type == 'L') { // GNU long name: data holds the next entry's path
      pending_long_name.assign(tar.data() + data_start, static_cast<size_t>(size));
      while (!pending_long_name.empty() && pending_long_name.back() == '\0')
        pending_long_name.pop_back();
      continue;
    }
    if (type == 'x') {
      pending_pax =
          detail_tar::parse_pax(tar.substr(data_start, static_cast<size_t>(size)));
      continue;
    }
    if (type == 'g') continue; // global pax: no per-entry effect we honor

    std::string path = !prefix.empty() ? prefix + "/" + name : name;
    if (!pending_long_name.empty()) {
      path = pending_long_name;
      pending_long_name.clear();
    }
    auto pax_path = pending_pax.find("path");
    if (pax_path != pending_pax.end()) path = pax_path->second;
    pending_pax.clear();

    if (type == '5') {
      entries.push_back({path, "", true});
      continue;
    }
    if (type != '0' && type != '\0') continue; // links, devices: skipped
    entries.push_back({path, tar.substr(data_start, static_cast<size_t>(size)), false});
  }
  return entries;
}

namespace detail_tar {

// Normalizes an entry path and rejects anything escaping the root.
inline std::filesystem::path sandboxed(const std::string& entry_path) {
  std::filesystem::path p(entry_path);
  if (p.is_absolute()) throw ArchiveError("archive entry has an absolute path: " + entry_path);
  std::filesystem::path clean;
  for (const auto& part : p) {
    if (part == ".") continue;
    if (part == "..") {
      if (clean.empty())
        throw ArchiveError("archive entry escapes the extraction root: " + entry_path);
      clean = clean.parent_path();
      continue;
    }
    clean /= part;
  }
  if (clean.empty()) throw ArchiveError("archive entry path is empty");
  return clean;
}

// The shared leading directory, "" when entries do not agree on one.
inline std::string shared_root(const std::vector<TarEntry>& entries) {
  std::string root;
  for (const TarEntry& e : entries) {
    std::filesystem::path p = sandboxed(e.path);
    auto it = p.begin();
    if (it == p.end()) return "";
    std::string first = it->string();
    ++it;
    if (it == p.end() && !e.is_dir) return ""; // top-level file: nothing shared
    if (root.empty())
      root = first;
    else if (root != first)
      return "";
  }
  return root;
}

} // namespace detail_tar

// Extracts entries under root_dir, stripping the shared leading directory.
// Returns the relative paths of the regular files written.
inline std::vector<std::string> extract_tar_gz(const std::string& bytes,
                                               const std::filesystem::path& root_dir) {
  std::vector<TarEntry> entries = parse_tar(gunzip(bytes));
  std::string strip = detail_tar::shared_root(entries);
  std::vector<std::string> written;
  std::filesystem::create_directories(root_dir);
  for (const TarEntry& e : entries) {
    std::filesystem::path rel = detail_tar::sandboxed(e.path);
    if (!strip.empty()) {
      std::filesystem::path stripped;
      bool first = true;
      for (const auto& part : rel) {
        if (first) {
          first = false;
          continue;
        }
        stripped /= part;
      }
      rel = stripped;
      if (rel.empty()) continue; // the shared root itself
    }
    std::filesystem::path dest = root_dir / rel;
    if (e.is_dir) {
      std::filesystem::create_directories(dest);
      continue;
    }
    std::filesystem::create_directories(dest.parent_path());
    std::ofstream out(dest, std::ios::binary);
    if (!out) throw ArchiveError("cannot write " + dest.string());
    out.write(e.data.data(), static_cast<std::streamsize>(e.data.size()));
    written.push_back(rel.generic_string());
  }
  return written;
}

// ------------------------------------------------------------- tar writing

inline std::string write_tar(const std::vector<TarEntry>& entries) {
  std::string out;
  auto write_record = [&](const std::string& path, const std::string& data, char type) {
    char h[512];
    std::memset(h, 0, sizeof h);
    std::snprintf(h, 100, "%s", path.c_str());
    std::snprintf(h + 100, 8, "%07o", type == '5' ? 0755 : 0644);
    std::snprintf(h + 108, 8, "%07o", 0);
    std::snprintf(h + 116, 8, "%07o", 0);
    std::snprintf(h + 124, 12, "%011llo", static_cast<unsigned long long>(data.size()));
    std::snprintf(h + 136, 12, "%011o", 0);
    std::memset(h + 148, ' ', 8); // checksum computed over spaces
    h[156] = type;
    std::memcpy(h + 257, "ustar", 5);
    h[263] = '0';
    h[264] = '0';
    unsigned sum = 0;
    for (unsigned char c : h) sum += c;
    std::snprintf(h + 148, 8, "%06o", sum);
    h[155] = ' ';
    out.append(h, 512);
    out.append(data);
    out.append((512 - data.size() % 512) % 512, '\0');
  };
  for (const TarEntry& e : entries) {
    if (e.path.size() > 99) write_record("././@LongLink", e.path + '\0', 'L');
    write_record(e.path.size() > 99 ? e.path.substr(0, 99) : e.path,
                 e.is_dir ? std::string() : e.data, e.is_dir ? '5' : '0');
  }
  out.append(1024, '\0');
  return out;
}

inline std::string write_tar_gz(const std::vector<TarEntry>& entries) {
  return gzip_compress(write_tar(entries));
}

} // namespace redflow
