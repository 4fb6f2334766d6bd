#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace agelab::manifest {

inline constexpr const char* kManifestName = "manifest.txt";

std::uint32_t crc32_file(const std::filesystem::path& path);

// Writes <dir>/manifest.txt: one "crc32<tab>bytes<tab>relative-path" line per
// file under dir (recursive, sorted, manifest excluded).
void write_manifest(const std::filesystem::path& dir);

// Re-checksums the directory against its manifest. Returns human-readable
// mismatch descriptions; empty means verified.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace agelab::manifest
