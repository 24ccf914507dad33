#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "augmc/errors.hpp"

namespace augmc {

// Flat key-value config text: one `key = value` per line, dotted keys for
// nesting, `#` starts a comment. Every key must be consumed by the
// experiment that loads the file; leftovers are reported with their line
// number, as are all other complaints.
class config_map {
 public:
  static config_map parse_string(const std::string& text,
                                 const std::string& name = "<config>") {
    config_map cfg;
    cfg.name_ = name;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        cfg.fail(line_no, "expected `key = value`");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) cfg.fail(line_no, "empty key");
      if (!valid_key(key))
        cfg.fail(line_no, "malformed key '" + key + "'");
      if (cfg.entries_.count(key))
        cfg.fail(line_no, "duplicate key '" + key + "'");
      cfg.entries_[key] = entry{value, line_no, false};
    }
    return cfg;
  }

  static config_map parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
  }

  const std::string& name() const { return name_; }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw config_error(name_ + ": missing required key '" + key + "'");
    it->second.consumed = true;
    return it->second.value;
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
  }

  double get_real(const std::string& key) {
    const std::string raw = get_string(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      fail(line_of(key), "key '" + key + "': not a real number: '" + raw + "'");
    }
    return 0.0;  // unreachable
  }

  double get_real_or(const std::string& key, double fallback) {
    return has(key) ? get_real(key) : fallback;
  }

  std::uint64_t get_count(const std::string& key) {
    const std::string raw = get_string(key);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(raw, &used);
      if (used != raw.size() || v <= 0) throw std::invalid_argument(raw);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      fail(line_of(key), "key '" + key + "': not a positive count: '" + raw + "'");
    }
    return 0;  // unreachable
  }

  std::uint64_t get_count_or(const std::string& key, std::uint64_t fallback) {
    return has(key) ? get_count(key) : fallback;
  }

  std::vector<std::string> get_string_list(const std::string& key) {
    const std::string raw = get_string(key);
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    if (out.empty()) fail(line_of(key), "key '" + key + "': empty list");
    return out;
  }

  std::vector<std::uint64_t> get_count_list(const std::string& key) {
    const std::vector<std::string> items = get_string_list(key);
    std::vector<std::uint64_t> out;
    for (const std::string& s : items) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size() || v <= 0) throw std::invalid_argument(s);
        out.push_back(static_cast<std::uint64_t>(v));
      } catch (const std::exception&) {
        fail(line_of(key), "key '" + key + "': not a positive count: '" + s + "'");
      }
    }
    return out;
  }

  // Reject any key never asked for, naming the first offender's line.
  void finish() const {
    for (const auto& [key, e] : entries_)
      if (!e.consumed)
        throw config_error(name_ + ":" + std::to_string(e.line) +
                           ": unknown key '" + key + "'");
  }

  // All entries, in line order, for echoing into run summaries.
  std::vector<std::pair<std::string, std::string>> echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(entries_.size());
    std::vector<const std::pair<const std::string, entry>*> sorted;
    for (const auto& kv : entries_) sorted.push_back(&kv);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->second.line < b->second.line; });
    for (const auto* kv : sorted) out.emplace_back(kv->first, kv->second.value);
    return out;
  }

  // Force-set a key (used by --seed-override); keeps the original line tag.
  void override_value(const std::string& key, const std::string& value) {
    entries_[key].value = value;
  }

 private:
  struct entry {
    std::string value;
    std::size_t line = 0;
    bool consumed = false;
  };

  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw config_error(name_ + ":" + std::to_string(line) + ": " + message);
  }

  std::size_t line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static bool valid_key(const std::string& key) {
    for (const char c : key)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' &&
          c != '_' && c != '-')
        return false;
    return true;
  }

  std::string name_;
  std::map<std::string, entry> entries_;
};

}  // namespace augmc
