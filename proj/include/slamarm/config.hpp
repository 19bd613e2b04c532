// slamarm - flat-key scenario configuration, hand-editable plain text
// SPDX-License-Identifier: MIT

#ifndef SLAMARM_CONFIG_HPP
#define SLAMARM_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slamarm/lie.hpp"

namespace slamarm {

/// Ordered key-value store: `key = value` lines, '#' comments, keys dotted.
/// Order is preserved so parse -> serialize -> parse is the identity.
class FlatConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
  };

  static FlatConfig parse_text(const std::string& text) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
      }
      Entry e{trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1))};
      if (e.key.empty()) {
        throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
      }
      cfg.entries_.push_back(std::move(e));
    }
    return cfg;
  }

  static FlatConfig parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_text(ss.str());
  }

  std::string serialize() const {
    std::ostringstream out;
    for (const auto& e : entries_) out << e.key << " = " << e.value << "\n";
    return out.str();
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  const std::vector<Entry>& entries() const { return entries_; }

  void set(const std::string& key, const std::string& value) {
    for (auto& e : entries_) {
      if (e.key == key) {
        e.value = value;
        return;
      }
    }
    entries_.push_back({key, value});
  }

  std::string get_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw std::runtime_error("config: missing key '" + key + "'");
    return e->value;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  double get_double(const std::string& key) const { return to_double(get_string(key), key); }
  double get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? to_double(e->value, key) : fallback;
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    return static_cast<std::int64_t>(to_double(e->value, key));
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "on" || e->value == "1") return true;
    if (e->value == "false" || e->value == "off" || e->value == "0") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean");
  }

  /// Whitespace-separated vector value of fixed size.
  VectorXd get_vector(const std::string& key, int size) const {
    const std::string s = get_string(key);
    std::istringstream in(s);
    VectorXd v(size);
    for (int i = 0; i < size; ++i) {
      std::string tok;
      if (!(in >> tok)) throw std::runtime_error("config: key '" + key + "' needs " + std::to_string(size) + " numbers");
      v(i) = to_double(tok, key);
    }
    std::string extra;
    if (in >> extra) throw std::runtime_error("config: key '" + key + "' has trailing values");
    return v;
  }
  Vector3d get_vec3(const std::string& key) const { return Vector3d(get_vector(key, 3)); }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static double to_double(const std::string& s, const std::string& key) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      throw std::runtime_error("config: key '" + key + "' has a malformed number '" + s + "'");
    }
    return v;
  }
  const Entry* find(const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  std::vector<Entry> entries_;
};

}  // namespace slamarm

#endif  // SLAMARM_CONFIG_HPP
