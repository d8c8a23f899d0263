#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace qcmps::cli {

inline constexpr const char* kSchemaVersion = "qcmps-result/1";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, sha256)
    std::vector<std::string> outputs;
    std::string tool_version;
    unsigned threads = 1;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void add_input(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;
};

} // namespace qcmps::cli
