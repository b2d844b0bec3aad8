#include "metgen/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "metgen/errors.hpp"

namespace metgen {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string normalize_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  return key;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = normalize_key(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": empty key");
    if (!cfg.entries_.emplace(key, value).second) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": duplicate key " + key);
    }
  }
  return cfg;
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  auto it = entries_.find(normalize_key(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::ConfigError, key + ": '" + value + "' is not an integer");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double out = std::stod(value, &used);
    if (used == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::ConfigError, key + ": '" + value + "' is not a number");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorKind::ConfigError, key + ": '" + value + "' is not a boolean");
}

}  // namespace metgen
