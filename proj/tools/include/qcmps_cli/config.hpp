#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

namespace qcmps::cli {

/// Thrown for malformed or inconsistent configuration files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A small TOML subset: [section] headers, key = value lines, '#' comments.
/// Values are double-quoted strings, integers, floats, or true/false.
class ConfigFile {
public:
    using Value = std::variant<std::string, long long, double, bool>;

    static ConfigFile parse(std::istream& in, const std::string& name = "<config>");
    static ConfigFile load(const std::filesystem::path& path);

    /// Directory relative paths in the file resolve against.
    const std::filesystem::path& base_dir() const { return base_dir_; }

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
    std::optional<long long> get_int(const std::string& section, const std::string& key) const;
    std::optional<double> get_double(const std::string& section, const std::string& key) const;
    std::optional<bool> get_bool(const std::string& section, const std::string& key) const;
    /// A string value resolved against base_dir() when relative.
    std::optional<std::filesystem::path> get_path(const std::string& section, const std::string& key) const;

    /// Throws ConfigError naming the first key not in `known` ("section.key").
    void reject_unknown(const std::set<std::string>& known) const;

private:
    const Value* find(const std::string& section, const std::string& key) const;

    std::string name_;
    std::filesystem::path base_dir_;
    std::map<std::string, Value> values_; // "section.key"
};

} // namespace qcmps::cli
