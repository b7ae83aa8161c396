#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ttrnn/tensor.hpp"

namespace ttrnn {

index_t parse_int(const std::string& text);
double parse_double(const std::string& text);
/// Comma-separated positive integers, e.g. "8,20,20,18".
std::vector<index_t> parse_factors(const std::string& text);

/// Key=value run configuration: UTF-8 text, # comments, blank lines
/// ignored, later assignments win. Flag overrides are applied on top via
/// set(). All parse failures throw ConfigError.
class RunConfig {
public:
    RunConfig() = default;
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    index_t get_int(const std::string& key, index_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<index_t> get_factors(const std::string& key) const;

    /// Throws ConfigError naming the first key outside the allowed set.
    void require_known(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace ttrnn
