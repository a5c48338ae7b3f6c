#include "nullcone/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nc {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    for (size_t i = 0; i < k.size(); ++i) {
        const char c = k[i];
        if (c == '.' && k[i - 1] == '.') return false;
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            return false;
    }
    return true;
}

// Strips a trailing comment that is not inside double quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (!quoted && line[i] == '#') return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

double parse_double(const std::string& text, const std::string& path) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(path, "expected a number, got an empty value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(path, "expected a number, got '" + t + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string at = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(at, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!section.empty() && !valid_key(section))
                throw ConfigError(at, "invalid section name '" + section + "'");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(at, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) throw ConfigError(at, "invalid key '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full)) throw ConfigError(at, "duplicate key '" + full + "'");
        cfg.values_[full] = unquote(trim(line.substr(eq + 1)));
        cfg.lines_[full] = line_no;
    }
    return cfg;
}

Config Config::load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file, "cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), file);
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError(key, "invalid key");
    values_[key] = value;
}

std::vector<std::string> Config::keys() const {
    std::vector<std::string> k;
    for (const auto& [key, v] : values_) k.push_back(key);
    return k;
}

std::string Config::where(const std::string& key) const {
    auto it = lines_.find(key);
    if (it == lines_.end()) return key;
    return key + " (" + origin_ + ":" + std::to_string(it->second) + ")";
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::num(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, where(key));
}

int Config::integer(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double v = parse_double(it->second, where(key));
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(where(key), "expected an integer, got '" + it->second + "'");
    return static_cast<int>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(where(key), "expected a boolean, got '" + it->second + "'");
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    if (trim(it->second).empty()) return out;
    for (const std::string& item : split_list(it->second)) out.push_back(parse_double(item, where(key)));
    return out;
}

std::vector<int> Config::int_list(const std::string& key, const std::vector<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (double v : list(key, {})) {
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ConfigError(where(key), "expected integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void Config::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, v] : values_) {
        bool ok = false;
        for (const std::string& a : allowed) {
            if (a.size() >= 2 && a.compare(a.size() - 2, 2, ".*") == 0) {
                const std::string prefix = a.substr(0, a.size() - 1);
                ok = key.compare(0, prefix.size(), prefix) == 0;
            } else {
                ok = key == a;
            }
            if (ok) break;
        }
        if (!ok) throw ConfigError(where(key), "unknown key");
    }
}

std::string Config::dump() const {
    std::string out;
    for (const auto& [key, v] : values_) out += key + " = " + v + "\n";
    return out;
}

}  // namespace nc
