#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace agelab::config {

// Plain-text configuration: `[section]` headers over `key = value` lines.
// `#` and `;` start comments. Keys outside a section, duplicate keys, and
// malformed lines are collected and reported together.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has_section(const std::string& section) const {
    return sections.count(section) != 0;
  }
  std::optional<std::string> get(const std::string& section, const std::string& key) const;

  // Typed lookups; throw std::invalid_argument naming section.key on a
  // missing value (unless a fallback is given) or a parse failure.
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
};

ConfigFile parse(const std::string& text);
ConfigFile parse_file(const std::filesystem::path& path);

// Comma-separated numeric lists ("1, 2, 3"); throws on malformed entries.
std::vector<double> parse_double_list(const std::string& value);
std::vector<long> parse_long_list(const std::string& value);

// Fails fast on any section or key outside the allowed map, reporting every
// offender in one std::invalid_argument.
void require_known(const ConfigFile& file,
                   const std::map<std::string, std::set<std::string>>& allowed);

}  // namespace agelab::config
