#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace halfflow {

// Flat key=value configuration: one pair per line, `#` starts a
// comment, blank lines ignored, duplicate keys rejected.  A reader
// tracks which keys were consumed; finish() rejects the leftovers so
// unknown keys never pass silently.  resolved() returns every consumed
// key with the value actually used (defaults filled in), which every
// run writes next to its outputs.
class Config {
  public:
    Config() = default;
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    void override_value(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback);
    std::string require_string(const std::string& key);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    // Comma-separated list of doubles; empty value -> empty list.
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback);

    // Throws std::invalid_argument naming every unconsumed key.
    void finish() const;

    const std::map<std::string, std::string>& resolved() const { return resolved_; }
    std::string resolved_text() const;

  private:
    std::string consume(const std::string& key, const std::string& fallback,
                        bool required);

    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> resolved_;
};

std::string format_double_list(const std::vector<double>& values);

} // namespace halfflow
