#pragma once

#include <map>
#include <optional>
#include <string>

namespace metgen {

// Key-value configuration file:
//
//   # comment
//   beam = 10
//   judge_threshold = 0.55
//
// Keys are lowercase; '-' and '_' are interchangeable. Blank lines and lines
// starting with '#' are ignored. Throws Error{ConfigError} naming the line for
// malformed or duplicated entries.
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path);
  static ConfigFile parse(const std::string& text);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

std::string normalize_key(std::string key);

// Typed conversions; throw Error{ConfigError} naming the key.
int parse_int(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);

}  // namespace metgen
