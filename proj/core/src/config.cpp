#include "halfflow/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace halfflow {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key on line " +
                                        std::to_string(lineno));
        if (!cfg.entries_.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::override_value(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

std::string Config::consume(const std::string& key, const std::string& fallback,
                            bool required) {
    consumed_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        if (required)
            throw std::invalid_argument("config: missing required key '" + key + "'");
        resolved_[key] = fallback;
        return fallback;
    }
    resolved_[key] = it->second;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    return consume(key, fallback, false);
}

std::string Config::require_string(const std::string& key) {
    return consume(key, "", true);
}

double Config::get_double(const std::string& key, double fallback) {
    const std::string raw = consume(key, fmt17(fallback), false);
    try {
        size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' is not a number: '" +
                                    raw + "'");
    }
}

int Config::get_int(const std::string& key, int fallback) {
    const std::string raw = consume(key, std::to_string(fallback), false);
    try {
        size_t used = 0;
        const long v = std::stol(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' is not an integer: '" +
                                    raw + "'");
    }
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) {
    const std::string raw = consume(key, std::to_string(fallback), false);
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' is not a seed: '" +
                                    raw + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) {
    const std::string raw = consume(key, fallback ? "true" : "false", false);
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean: '" + raw +
                                "'");
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) {
    const std::string raw = consume(key, format_double_list(fallback), false);
    std::vector<double> out;
    size_t pos = 0;
    while (pos < raw.size()) {
        size_t comma = raw.find(',', pos);
        if (comma == std::string::npos) comma = raw.size();
        const std::string tok = trim(raw.substr(pos, comma - pos));
        if (!tok.empty()) {
            try {
                size_t used = 0;
                out.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw std::invalid_argument("config: key '" + key +
                                            "' has a bad list entry: '" + tok + "'");
            }
        }
        pos = comma + 1;
    }
    return out;
}

void Config::finish() const {
    std::string unknown;
    for (const auto& [key, value] : entries_) {
        if (consumed_.count(key)) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += key;
    }
    if (!unknown.empty())
        throw std::invalid_argument("config: unknown keys: " + unknown);
}

std::string Config::resolved_text() const {
    std::string out = "# resolved configuration (defaults filled in)\n";
    for (const auto& [key, value] : resolved_) out += key + "=" + value + "\n";
    return out;
}

std::string format_double_list(const std::vector<double>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += fmt17(values[i]);
    }
    return out;
}

} // namespace halfflow
