#include "agelab/manifest.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace agelab::manifest {

namespace {

struct Entry {
  std::uint32_t crc = 0;
  std::uintmax_t size = 0;
};

Entry checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for checksum: " + path.string());
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::uintmax_t total = 0;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(buffer), static_cast<uInt>(got));
    total += static_cast<std::uintmax_t>(got);
  }
  return {static_cast<std::uint32_t>(crc), total};
}

std::map<std::string, Entry> scan(const std::filesystem::path& dir) {
  std::map<std::string, Entry> entries;  // relative path -> checksum; sorted
  for (const auto& item : std::filesystem::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    const std::string rel = item.path().lexically_relative(dir).generic_string();
    if (rel == kManifestName) continue;
    entries.emplace(rel, checksum(item.path()));
  }
  return entries;
}

}  // namespace

std::uint32_t crc32_file(const std::filesystem::path& path) { return checksum(path).crc; }

void write_manifest(const std::filesystem::path& dir) {
  const std::map<std::string, Entry> entries = scan(dir);
  std::ofstream out(dir / kManifestName, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  for (const auto& [rel, entry] : entries) {
    char crc_hex[16];
    std::snprintf(crc_hex, sizeof(crc_hex), "%08x", entry.crc);
    out << crc_hex << "\t" << entry.size << "\t" << rel << "\n";
  }
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  std::ifstream in(dir / kManifestName, std::ios::binary);
  if (!in) return {"manifest missing in " + dir.string()};

  std::map<std::string, Entry> listed;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream parts(line);
    std::string crc_hex, size_text, rel;
    if (!std::getline(parts, crc_hex, '\t') || !std::getline(parts, size_text, '\t') ||
        !std::getline(parts, rel)) {
      problems.push_back("malformed manifest line: " + line);
      continue;
    }
    Entry entry;
    entry.crc = static_cast<std::uint32_t>(std::stoul(crc_hex, nullptr, 16));
    entry.size = std::stoull(size_text);
    listed.emplace(rel, entry);
  }

  const std::map<std::string, Entry> actual = scan(dir);
  for (const auto& [rel, entry] : actual) {
    const auto it = listed.find(rel);
    if (it == listed.end()) {
      problems.push_back("unlisted file: " + rel);
    } else if (it->second.crc != entry.crc || it->second.size != entry.size) {
      problems.push_back("checksum mismatch: " + rel);
    }
  }
  for (const auto& [rel, entry] : listed) {
    if (!actual.count(rel)) problems.push_back("missing file: " + rel);
  }
  return problems;
}

}  // namespace agelab::manifest
