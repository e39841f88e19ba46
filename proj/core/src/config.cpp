#include "envelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace envelab::config {

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line, section = "global";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            c.data_[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (c.data_[section].count(key))
            throw ConfigError("config: duplicate key '" + key + "' in [" + section + "]");
        c.data_[section][key] = val;
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    if (s == data_.end() || !s->second.count(key))
        throw ConfigError("config: missing [" + section + "] " + key);
    return s->second.at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    size_t pos = 0;
    long out;
    try {
        out = std::stol(v, &pos);
    } catch (...) {
        throw ConfigError("config: [" + section + "] " + key + " is not an integer: " + v);
    }
    if (pos != v.size())
        throw ConfigError("config: [" + section + "] " + key + " is not an integer: " + v);
    return out;
}

long Config::get_int_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    return parse_angle(get(section, key));
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(section, key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_angle(item));
    }
    if (out.empty()) throw ConfigError("config: [" + section + "] " + key + " is an empty list");
    return out;
}

std::vector<long> Config::get_int_list(const std::string& section, const std::string& key) const {
    std::vector<long> out;
    std::stringstream ss(get(section, key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t pos = 0;
        long v = std::stol(item, &pos);
        if (pos != item.size())
            throw ConfigError("config: [" + section + "] " + key + " has a non-integer entry");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("config: [" + section + "] " + key + " is an empty list");
    return out;
}

void Config::validate(const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [section, kv] : data_) {
        auto it = schema.find(section);
        if (it == schema.end()) throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, _] : kv) {
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
        }
    }
}

double parse_angle(const std::string& raw) {
    std::string s = trim(raw);
    auto star = s.find('*');
    auto slash = s.find('/');
    auto to_num = [](const std::string& x) -> double {
        std::string t = trim(x);
        if (t == "pi") return std::numbers::pi;
        size_t pos = 0;
        double v;
        try {
            v = std::stod(t, &pos);
        } catch (...) {
            throw ConfigError("config: cannot parse number '" + t + "'");
        }
        if (pos != t.size()) throw ConfigError("config: cannot parse number '" + t + "'");
        return v;
    };
    if (star == std::string::npos && slash == std::string::npos) return to_num(s);
    double num = 1.0, den = 1.0;
    std::string head = s;
    if (slash != std::string::npos) {
        den = to_num(s.substr(slash + 1));
        head = s.substr(0, slash);
    }
    star = head.find('*');
    if (star != std::string::npos) {
        num = to_num(head.substr(0, star)) * to_num(head.substr(star + 1));
    } else {
        num = to_num(head);
    }
    return num / den;
}

}  // namespace envelab::config
