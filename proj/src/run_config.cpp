#include "ttrnn/run_config.hpp"

#include <fstream>

#include "ttrnn/errors.hpp"

namespace ttrnn {

namespace {

std::string trim(const std::string& s) {
    const std::size_t first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const std::size_t last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

index_t parse_int(const std::string& text) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + text + "'");
    }
    if (pos != text.size()) throw ConfigError("not an integer: '" + text + "'");
    return static_cast<index_t>(v);
}

double parse_double(const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
    if (pos != text.size()) throw ConfigError("not a number: '" + text + "'");
    return v;
}

std::vector<index_t> parse_factors(const std::string& text) {
    std::vector<index_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string part =
            trim(comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start));
        if (part.empty()) throw ConfigError("empty entry in factor list '" + text + "'");
        const index_t v = parse_int(part);
        if (v < 1) throw ConfigError("factors must be positive, got '" + part + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty factor list");
    return out;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = value;
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

index_t RunConfig::get_int(const std::string& key, index_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return parse_int(it->second);
    } catch (const ConfigError&) {
        throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'");
    }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return parse_double(it->second);
    } catch (const ConfigError&) {
        throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
    }
}

std::vector<index_t> RunConfig::get_factors(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return {};
    try {
        return parse_factors(it->second);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

void RunConfig::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_)
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
}

} // namespace ttrnn
