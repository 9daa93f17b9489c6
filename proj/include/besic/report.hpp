#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace besic {

// Writes files under one output directory and records their SHA-256.
class ManifestWriter {
public:
    explicit ManifestWriter(std::string dir);

    const std::string& dir() const { return dir_; }

    void write(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const nlohmann::json& j);

    // manifest.json: {"files": [{"name", "sha256", "bytes"}...], plus `extra` keys}.
    void finish(const nlohmann::json& extra = nlohmann::json::object());

    const nlohmann::json& entries() const { return files_; }

private:
    std::string dir_;
    nlohmann::json files_ = nlohmann::json::array();
};

std::string read_file(const std::string& path);

// Names of manifest entries whose content no longer matches.
std::vector<std::string> verify_manifest(const std::string& dir);

} // namespace besic
