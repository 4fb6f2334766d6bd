#include "agelab/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace agelab::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw std::invalid_argument(context + ": " + what);
}

}  // namespace

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  const auto sec = sections.find(section);
  if (sec == sections.end()) return std::nullopt;
  const auto entry = sec->second.find(key);
  if (entry == sec->second.end()) return std::nullopt;
  return entry->second;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
  const auto value = get(section, key);
  if (!value) fail(section + "." + key, "missing required value");
  return *value;
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    std::size_t used = 0;
    const double value = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    fail(section + "." + key, "not a number: '" + raw + "'");
  }
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  return get(section, key) ? get_double(section, key) : fallback;
}

long ConfigFile::get_long(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    std::size_t used = 0;
    const long value = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    fail(section + "." + key, "not an integer: '" + raw + "'");
  }
}

long ConfigFile::get_long(const std::string& section, const std::string& key,
                          long fallback) const {
  return get(section, key) ? get_long(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  const auto value = get(section, key);
  if (!value) return fallback;
  if (*value == "true" || *value == "1" || *value == "yes") return true;
  if (*value == "false" || *value == "0" || *value == "no") return false;
  fail(section + "." + key, "not a boolean: '" + *value + "'");
}

ConfigFile parse(const std::string& text) {
  ConfigFile file;
  std::vector<std::string> errors;
  std::string section;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      file.sections[section];  // sections may legitimately be empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (section.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": key before any [section]");
      continue;
    }
    if (!file.sections[section].emplace(key, value).second) {
      errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + section +
                       "." + key + "'");
    }
  }
  if (!errors.empty()) {
    std::string combined = "config errors:";
    for (const std::string& e : errors) combined += "\n  " + e;
    throw std::invalid_argument(combined);
  }
  return file;
}

ConfigFile parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  std::istringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty entry in list: '" + value + "'");
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) {
      throw std::invalid_argument("bad number in list: '" + item + "'");
    }
  }
  return out;
}

std::vector<long> parse_long_list(const std::string& value) {
  std::vector<long> out;
  std::istringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty entry in list: '" + value + "'");
    std::size_t used = 0;
    out.push_back(std::stol(item, &used));
    if (used != item.size()) {
      throw std::invalid_argument("bad integer in list: '" + item + "'");
    }
  }
  return out;
}

void require_known(const ConfigFile& file,
                   const std::map<std::string, std::set<std::string>>& allowed) {
  std::vector<std::string> errors;
  for (const auto& [section, entries] : file.sections) {
    const auto known = allowed.find(section);
    if (known == allowed.end()) {
      errors.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, value] : entries) {
      if (!known->second.count(key)) {
        errors.push_back("unknown key '" + section + "." + key + "'");
      }
    }
  }
  if (!errors.empty()) {
    std::string combined = "config errors:";
    for (const std::string& e : errors) combined += "\n  " + e;
    throw std::invalid_argument(combined);
  }
}

}  // namespace agelab::config
