#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "dcl/errors.hpp"

namespace dcl {

/// Round-trippable floating-point formatting for CSV output.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Flat key = value configuration with '#' comments. Keys are read through
/// the accessors; finish() rejects any key that was never consumed, so typos
/// surface as errors.
class Config {
 public:
  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (strip(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = strip(line.substr(0, eq));
      const std::string val = strip(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key");
      cfg.values_[key] = val;
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing parameter: " + key);
    used_.insert(key);
    return it->second;
  }

  double require_num(const std::string& key) const {
    return parse_num(key, require(key));
  }

  double num_or(const std::string& key, double dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    used_.insert(key);
    return parse_num(key, it->second);
  }

  std::string str_or(const std::string& key, const std::string& dflt) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    used_.insert(key);
    return it->second;
  }

  void finish() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ConfigError("unknown parameter: " + k);
  }

 private:
  static std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static double parse_num(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("parameter " + key + ": not a number: " + v);
    }
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace dcl
