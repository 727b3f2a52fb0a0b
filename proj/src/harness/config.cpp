#include "bmlab/harness/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bmlab::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
    auto [it, fresh] = cfg.sections_[section].emplace(key, Entry{value, lineno});
    if (!fresh)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " +
                        section + "." + key);
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    throw ConfigError(origin_ + ": missing required key " + section + "." + key);
  return s->second.at(key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": value of " + section + "." + key +
                      " is not a number: " + v);
  }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_long(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(origin_ + ": value of " + section + "." + key +
                      " is not an integer: " + v);
  return out;
}

long Config::get_long(const std::string& section, const std::string& key,
                      long fallback) const {
  return has(section, key) ? get_long(section, key) : fallback;
}

uint64_t Config::get_u64(const std::string& section, const std::string& key,
                         uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(origin_ + ": value of " + section + "." + key +
                      " is not an unsigned integer: " + v);
  return out;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = Entry{value, 0};
}

void Config::require_known(const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [sec, entries] : sections_) {
    const auto s = schema.find(sec);
    if (s == schema.end())
      throw ConfigError(origin_ + ": unknown section [" + sec + "]");
    for (const auto& [key, entry] : entries) {
      if (!s->second.count(key))
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) +
                          ": unknown key " + sec + "." + key);
    }
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [sec, entries] : sections_) {
    out += "[" + sec + "]\n";
    for (const auto& [key, entry] : entries) out += key + " = " + entry.value + "\n";
  }
  return out;
}

}  // namespace bmlab::harness
