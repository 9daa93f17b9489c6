#include "besic/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "besic/error.hpp"
#include "besic/hash.hpp"

namespace besic {

ManifestWriter::ManifestWriter(std::string dir) : dir_(std::move(dir))
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_ + ": " + ec.message());
}

void ManifestWriter::write(const std::string& name, const std::string& content)
{
    const std::string path = dir_ + "/" + name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path);
    os << content;
    if (!os) throw ConfigError("write failed for " + path);
    files_.push_back({{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
}

void ManifestWriter::write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

void ManifestWriter::finish(const nlohmann::json& extra)
{
    nlohmann::json m = extra;
    m["files"] = files_;
    const std::string path = dir_ + "/manifest.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path);
    os << m.dump(2) << "\n";
}

std::string read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> verify_manifest(const std::string& dir)
{
    const auto m = nlohmann::json::parse(read_file(dir + "/manifest.json"));
    std::vector<std::string> bad;
    for (const auto& f : m.at("files")) {
        const std::string name = f.at("name");
        std::string content;
        try {
            content = read_file(dir + "/" + name);
        } catch (const Error&) {
            bad.push_back(name);
            continue;
        }
        if (sha256_hex(content) != f.at("sha256").get<std::string>()) bad.push_back(name);
    }
    return bad;
}

} // namespace besic
