#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

// Flat "key = value" configuration with [section] headers and '#' comments.
// Unknown keys are rejected against a per-experiment schema; parse errors
// carry line numbers. The canonical form (sorted sections and keys) is what
// gets hashed into the run manifest.

namespace bmlab::harness {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long get_long(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  uint64_t get_u64(const std::string& section, const std::string& key,
                   uint64_t fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // throws ConfigError naming the first unknown section/key (with line)
  void require_known(const std::map<std::string, std::set<std::string>>& schema) const;

  std::string canonical() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::string origin_ = "<none>";
};

}  // namespace bmlab::harness
