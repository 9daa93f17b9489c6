#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "besic/config.hpp"
#include "besic/error.hpp"
#include "besic/pipeline.hpp"
#include "besic/report.hpp"
#include "besic/svg.hpp"
#include "fixtures.hpp"

using namespace besic;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("besic_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(BESIC_EXE) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::vector<std::vector<double>> csv_rows(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
        rows.push_back(r);
    }
    return rows;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("config round trip and validation")
{
    RunConfig cfg;
    cfg.s = Rational(1, 2);
    cfg.depth = 4;
    cfg.profile = Profile::demo;
    cfg.seed = 99;
    const RunConfig back = config_from_json(to_json(cfg));
    CHECK(to_json(back).dump() == to_json(cfg).dump());
    CHECK(back.s == Rational(1, 2));
    CHECK(back.profile == Profile::demo);

    auto j = to_json(cfg);
    j["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"c", "1/8"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"depth", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json({{"profile", "fast"}}), ConfigError);
    CHECK(config_from_json({{"c", "2^-5"}}).c == pow2(-5));
}

TEST_CASE("level-set svg matches the csv")
{
    const Hierarchy& h = fixtures::strict();
    const TranslationField v(h);
    RenderParams p;
    p.level = 2;
    const std::string svg = render_svg(v, RenderTarget::level_set, p);
    CHECK(svg.find("viewBox=\"-0.05 -0.05 1.1 1.1\"") != std::string::npos);
    const std::regex rect(R"re(<rect x="([-0-9.e]+)" y="([-0-9.e]+)" width="([-0-9.e]+)" height="([-0-9.e]+)")re");
    std::vector<std::array<double, 4>> drawn;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it)
        drawn.push_back({std::stod((*it)[1]), std::stod((*it)[2]), std::stod((*it)[3]), std::stod((*it)[4])});
    const auto rows = csv_rows(level_csv(h.level(2)));
    REQUIRE(rows.size() == 16);
    for (const auto& r : rows) {
        bool found = false;
        for (const auto& d : drawn)
            found = found || (std::abs(d[0] - r[2]) <= 1e-9 && std::abs(d[1] - r[3]) <= 1e-9 &&
                              std::abs(d[2] - r[4]) <= 1e-9 && std::abs(d[3] - r[5]) <= 1e-9);
        CHECK(found);
    }
}

TEST_CASE("arc diagram ends at the far corner")
{
    const Hierarchy& h = fixtures::strict();
    const TranslationField v(h);
    RenderParams p;
    p.level = 1;
    const std::string svg = render_svg(v, RenderTarget::arc_diagram, p);
    const auto at = svg.find("<polyline points=\"");
    REQUIRE(at != std::string::npos);
    const auto end = svg.find('"', at + 18);
    const std::string pts = svg.substr(at + 18, end - at - 18);
    const std::string last = pts.substr(pts.find_last_of(' ') + 1);
    const double x = std::stod(last.substr(0, last.find(',')));
    const double y = std::stod(last.substr(last.find(',') + 1));
    CHECK(std::abs(x - 1) <= 1e-9);
    CHECK(std::abs(y - 1) <= 1e-9);
}

TEST_CASE("render cap")
{
    const TranslationField v(fixtures::strict());
    RenderParams p;
    p.level = 2;
    p.cap = 10;
    CHECK_THROWS_AS(render_svg(v, RenderTarget::level_set, p), ResourceCapError);
    CHECK_THROWS_AS(parse_render_target("heatmap"), ConfigError);
}

TEST_CASE("manifest hashes")
{
    const fs::path dir = scratch("manifest");
    ManifestWriter w(dir.string());
    w.write("a.txt", "abc");
    w.write_json("b.json", {{"k", 1}});
    w.finish({{"note", "x"}});
    // sha256("abc")
    CHECK(w.entries()[0]["sha256"] == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(verify_manifest(dir.string()).empty());
    std::ofstream(dir / "a.txt") << "abd";
    const auto bad = verify_manifest(dir.string());
    REQUIRE(bad.size() == 1);
    CHECK(bad[0] == "a.txt");
    fs::remove_all(dir);
}

TEST_CASE("pipeline output is byte-identical across runs")
{
    RunConfig cfg;
    cfg.profile = Profile::demo;
    cfg.spacing_samples = 500;
    cfg.identity_samples = 500;
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    std::ostringstream log;
    const RunResult ra = run_pipeline(cfg, a.string(), log);
    const RunResult rb = run_pipeline(cfg, b.string(), log);
    CHECK(ra.demo);
    CHECK(ra.files == rb.files);
    CHECK(log.str().find(kDemoBanner) != std::string::npos);
    for (const std::string& f : ra.files) {
        CAPTURE(f);
        CHECK(read_file((a / f).string()) == read_file((b / f).string()));
    }
    CHECK(read_file((a / "manifest.json").string()) == read_file((b / "manifest.json").string()));
    CHECK(verify_manifest(a.string()).empty());
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("command-line exit codes")
{
    CHECK(run_cli("seq") == 0);
    CHECK(run_cli("--c 1/3 seq") == 2);
    CHECK(run_cli("--c 1/8 seq") == 2);
    CHECK(run_cli("--depth 7 seq") == 3);
    CHECK(run_cli("--no-such-flag seq") == 2);
    CHECK(run_cli("arc --level 1") == 0);
    CHECK(run_cli("render --target level_set --level 3") == 3);
    CHECK(run_cli("vtheta --theta 3/10 --tol 1e-9") == 0);
}

}
