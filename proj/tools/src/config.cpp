#include "qcmps_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>

namespace qcmps::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool valid_key(const std::string& key) {
    return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

// Strips a trailing comment outside of a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\'))
            quoted = !quoted;
        else if (line[i] == '#' && !quoted)
            return line.substr(0, i);
    }
    return line;
}

ConfigFile::Value parse_value(const std::string& text, const std::string& where) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
            if (text[i] == '\\' && i + 2 < text.size()) {
                ++i;
                out.push_back(text[i] == 'n' ? '\n' : text[i] == 't' ? '\t' : text[i]);
            } else {
                out.push_back(text[i]);
            }
        }
        return out;
    }
    if (text == "true")
        return true;
    if (text == "false")
        return false;
    std::string digits;
    for (char c : text)
        if (c != '_')
            digits.push_back(c);
    long long i = 0;
    auto [iptr, iec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (iec == std::errc{} && iptr == digits.data() + digits.size())
        return i;
    double d = 0.0;
    auto [dptr, dec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (dec == std::errc{} && dptr == digits.data() + digits.size())
        return d;
    if (digits == "inf" || digits == "+inf")
        return std::numeric_limits<double>::infinity();
    throw ConfigError(where + ": cannot parse value '" + text + "'");
}

} // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = name + ":" + std::to_string(line_no);
        const std::string body = trim(strip_comment(line));
        if (body.empty())
            continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError(where + ": unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (!valid_key(section))
                throw ConfigError(where + ": invalid section name '" + section + "'");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        if (!valid_key(key))
            throw ConfigError(where + ": invalid key '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full))
            throw ConfigError(where + ": duplicate key '" + full + "'");
        cfg.values_[full] = parse_value(trim(body.substr(eq + 1)), where);
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    ConfigFile cfg = parse(in, path.string());
    cfg.base_dir_ = std::filesystem::absolute(path).parent_path();
    return cfg;
}

const ConfigFile::Value* ConfigFile::find(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section + "." + key);
    return it == values_.end() ? nullptr : &it->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::optional<std::string> ConfigFile::get_string(const std::string& section, const std::string& key) const {
    const Value* v = find(section, key);
    if (!v)
        return std::nullopt;
    if (const auto* s = std::get_if<std::string>(v))
        return *s;
    throw ConfigError(name_ + ": " + section + "." + key + " must be a string");
}

std::optional<long long> ConfigFile::get_int(const std::string& section, const std::string& key) const {
    const Value* v = find(section, key);
    if (!v)
        return std::nullopt;
    if (const auto* i = std::get_if<long long>(v))
        return *i;
    throw ConfigError(name_ + ": " + section + "." + key + " must be an integer");
}

std::optional<double> ConfigFile::get_double(const std::string& section, const std::string& key) const {
    const Value* v = find(section, key);
    if (!v)
        return std::nullopt;
    if (const auto* d = std::get_if<double>(v))
        return *d;
    if (const auto* i = std::get_if<long long>(v))
        return static_cast<double>(*i);
    throw ConfigError(name_ + ": " + section + "." + key + " must be a number");
}

std::optional<bool> ConfigFile::get_bool(const std::string& section, const std::string& key) const {
    const Value* v = find(section, key);
    if (!v)
        return std::nullopt;
    if (const auto* b = std::get_if<bool>(v))
        return *b;
    throw ConfigError(name_ + ": " + section + "." + key + " must be true or false");
}

std::optional<std::filesystem::path> ConfigFile::get_path(const std::string& section, const std::string& key) const {
    auto s = get_string(section, key);
    if (!s)
        return std::nullopt;
    std::filesystem::path p(*s);
    return p.is_absolute() || base_dir_.empty() ? p : (base_dir_ / p).lexically_normal();
}

void ConfigFile::reject_unknown(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_)
        if (!known.count(key))
            throw ConfigError(name_ + ": unknown key '" + key + "'");
}

} // namespace qcmps::cli
