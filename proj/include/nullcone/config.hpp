#pragma once
// Plain-text configuration: nested sections, dotted keys, comments.
//
//   # comment (also after a value)
//   [goursat]              section header; [a.b] nests
//   lambdas = 0.9, 0.95    list values are comma separated
//   oracle.kind = plane_wave
//
// Keys are addressed by their full dotted path ("goursat.lambdas").

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nc {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& file);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    void set(const std::string& key, const std::string& value);
    std::vector<std::string> keys() const;

    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<int> int_list(const std::string& key, const std::vector<int>& fallback) const;

    // Rejects keys outside the allowed set; entries ending in ".*" allow a subtree.
    void require_known(const std::vector<std::string>& allowed) const;

    // Canonical text form (sorted keys), parseable by parse().
    std::string dump() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::string origin_;
    std::string where(const std::string& key) const;
};

}  // namespace nc
