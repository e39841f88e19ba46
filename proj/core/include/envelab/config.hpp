#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace envelab::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented key-value text with [sections]; '#' starts a comment. Keys
// are validated against a per-experiment schema (unknown keys rejected).
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    long get_int(const std::string& section, const std::string& key) const;
    long get_int_or(const std::string& section, const std::string& key, long fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    // Comma-separated doubles; each entry may be "pi", "pi/N" or "N*pi/M".
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<long> get_int_list(const std::string& section, const std::string& key) const;

    // Throws ConfigError if any present key is not in the allowed set.
    void validate(const std::map<std::string, std::vector<std::string>>& schema) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return data_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

// Parses a scalar that may mention pi ("pi", "pi/6", "2*pi/3", "0.5").
double parse_angle(const std::string& s);

}  // namespace envelab::config
