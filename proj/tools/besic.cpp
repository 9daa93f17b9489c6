#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "besic/config.hpp"
#include "besic/format.hpp"
#include "besic/measure.hpp"
#include "besic/pipeline.hpp"
#include "besic/report.hpp"
#include "besic/svg.hpp"

using namespace besic;

namespace {

struct Globals {
    std::string config;
    std::string out;
    int threads = 0;
    std::string s, c, profile;
    int depth = 0;
    std::optional<std::uint64_t> seed;
};

RunConfig resolve(const Globals& g)
{
    RunConfig cfg = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (!g.s.empty()) cfg.s = parse_rational(g.s);
    if (!g.c.empty()) cfg.c = parse_rational(g.c);
    if (!g.profile.empty()) cfg.profile = parse_profile(g.profile);
    if (g.depth > 0) cfg.depth = g.depth;
    if (g.threads > 0) cfg.threads = g.threads;
    if (g.seed) cfg.seed = *g.seed;
    validate(cfg);
    return cfg;
}

void emit(const Globals& g, const std::string& name, const std::string& content)
{
    if (g.out.empty()) {
        std::cout << content;
        return;
    }
    std::filesystem::create_directories(g.out);
    std::ofstream os(g.out + "/" + name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + g.out + "/" + name);
    os << content;
    std::cerr << "wrote " << g.out << "/" << name << "\n";
}

int code(ExitCode c) { return static_cast<int>(c); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cantor graph rotation families: construction, verification, measurement and rendering"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON run configuration");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--s", g.s, "target dimension s in [0, 1]");
    app.add_option("--c", g.c, "constant c = 2^-k < 1/10 (e.g. 2^-4)");
    app.add_option("--depth", g.depth, "number of levels");
    app.add_option("--profile", g.profile, "strict or demo");
    app.add_option("--seed", g.seed, "seed for sampled checks");

    auto* seq = app.add_subcommand("seq", "derive and validate the sequences");
    std::string seq_action = "derive";
    seq->add_option("action", seq_action, "derive | validate")->check(CLI::IsMember({"derive", "validate"}));

    auto* arc = app.add_subcommand("arc", "solve the arc C_n");
    int arc_level = 1;
    arc->add_option("--level", arc_level, "level n (1..depth-1)");

    auto* build = app.add_subcommand("build", "build the rectangle generations");

    auto* verify = app.add_subcommand("verify", "run the spacing, count and identity checks");

    auto* vth = app.add_subcommand("vtheta", "translation vectors");
    std::optional<std::string> vt_theta;
    int vt_table = 0;
    std::string vt_tol = "1e-30";
    vth->add_option("--theta", vt_theta, "angle in [0, 1] (left limit off the grid)");
    vth->add_option("--table", vt_table, "write the grid table of level n");
    vth->add_option("--tol", vt_tol, "limit tolerance");

    auto* tubes = app.add_subcommand("tubes", "tube family T_{n, l theta_n}");
    int tb_level = 1;
    std::string tb_l = "0";
    std::string tb_variant = "T";
    std::optional<std::string> tb_C;
    tubes->add_option("--level", tb_level, "level n");
    tubes->add_option("--l", tb_l, "angle index");
    tubes->add_option("--variant", tb_variant, "T or T_prime")->check(CLI::IsMember({"T", "T_prime"}));
    tubes->add_option("--C", tb_C, "tube constant");

    auto* area = app.add_subcommand("area", "rasterized neighborhood area of a stage");
    int ar_stage = 2;
    area->add_option("--stage", ar_stage, "stage n (radius theta_n)");

    auto* dim = app.add_subcommand("dim", "box-counting dimension of P_x(Gamma)");
    int dm_level = 0;
    dim->add_option("--max-level", dm_level, "largest level p (default depth)");

    auto* render = app.add_subcommand("render", "SVG figures");
    std::string rd_target = "level_set";
    int rd_level = 1;
    std::string rd_theta = "0";
    std::optional<std::string> rd_C;
    render->add_option("--target", rd_target, "arc_diagram | level_set | tube_stage | gamma_theta");
    render->add_option("--level", rd_level, "level n");
    render->add_option("--theta", rd_theta, "rotation angle (gamma_theta)");
    render->add_option("--C", rd_C, "tube constant (tube_stage)");

    auto* pipe = app.add_subcommand("pipeline", "run everything and write a manifest");
    bool pp_verify = false;
    pipe->add_flag("--verify-manifest", pp_verify, "re-check the hashes of an existing output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(ExitCode::config_error);
    }

    try {
        const RunConfig cfg = resolve(g);
        if (*seq) {
            const SequenceTable t = make_table(cfg);
            const ConstraintReport r = validate_sequences(t);
            if (seq_action == "derive") emit(g, "sequence.json", to_json(t).dump(2) + "\n");
            emit(g, "constraints.json", to_json(r).dump(2) + "\n");
            return code(r.passed() ? ExitCode::ok : ExitCode::verification_failed);
        }
        if (*arc) {
            const SequenceTable t = make_table(cfg);
            ArcSolveOptions o;
            o.angle_tol = cfg.angle_tol;
            emit(g, "arc_" + std::to_string(arc_level) + ".json", to_json(solve_arc(t, arc_level, o)).dump(2) + "\n");
            return 0;
        }
        const Hierarchy h(make_table(cfg), hierarchy_options(cfg));
        if (*build) {
            nlohmann::json s = {{"depth", h.depth()}, {"materialized_depth", h.materialized_depth()}};
            nlohmann::json lv = nlohmann::json::array();
            for (int n = 1; n <= h.depth(); ++n) {
                nlohmann::json e = {{"level", n}, {"materialized", h.is_materialized(n)}};
                try {
                    e["population"] = to_string(h.population(n));
                } catch (const ResourceCapError&) {
                    e["population"] = nullptr;
                }
                if (n < h.depth() && h.uniform_count_available(n)) e["N"] = h.uniform_count(n);
                lv.push_back(e);
            }
            s["levels"] = lv;
            if (!g.out.empty())
                for (int n = 1; n <= h.materialized_depth(); ++n)
                    emit(g, "level_" + std::to_string(n) + ".csv", level_csv(h.level(n)));
            std::cout << s.dump(2) << "\n";
            return 0;
        }
        if (*verify) {
            nlohmann::json out;
            bool ok = true;
            for (int n = 1; n < h.depth(); ++n) {
                const std::string k = std::to_string(n);
                if (!h.uniform_count_available(n)) continue;
                const CountBounds b = verify_counts(h, n);
                out["counts"][k] = to_json(b);
                ok = ok && b.sandwich && b.below_theta_ratio && b.population_ok;
                const bool exhaustive = h.is_materialized(n) && h.population(n) * h.uniform_count(n) <= 20'000'000;
                const LemmaReport r = exhaustive ? verify_spacing(h, n) : verify_spacing(h, n, cfg.spacing_samples, cfg.seed + n);
                out["spacing"][k] = to_json(r);
                const IdentityReport id = check_rotation_identity(h, n, cfg.identity_samples, cfg.seed + 100 + n);
                out["identity"][k] = to_json(id);
                ok = ok && r.passed() && id.passed();
            }
            for (int n = 1; n <= h.materialized_depth(); ++n) {
                const LevelCheck c = check_level(h.level(n), h.table());
                out["levels"][std::to_string(n)] = to_json(c);
                ok = ok && c.ok();
            }
            out["passed"] = ok;
            emit(g, "verify.json", out.dump(2) + "\n");
            return code(ok ? ExitCode::ok : ExitCode::verification_failed);
        }
        const TranslationField v(h);
        if (*vth) {
            if (vt_table > 0) {
                emit(g, "vtheta_" + std::to_string(vt_table) + ".csv", translation_csv(h.table(), v.table(vt_table)));
                return 0;
            }
            if (!vt_theta) throw ConfigError("vtheta needs --theta or --table");
            const Real th = to_real(parse_rational(*vt_theta));
            const LimitValue l = v.limit(th, to_real(parse_rational(vt_tol)));
            emit(g, "vtheta.json", to_json(l).dump(2) + "\n");
            return 0;
        }
        if (*tubes) {
            const Real C = tb_C ? to_real(parse_rational(*tb_C)) : cfg.C_tube;
            const TubeFamily f = tube_family(v, tb_level, static_cast<Count>(std::stoull(tb_l)), C,
                                             tb_variant == "T" ? TubeVariant::T : TubeVariant::T_prime);
            nlohmann::json boxes = nlohmann::json::array();
            for (const RotatedBox& b : f.tubes)
                boxes.push_back({{"center", point_json(b.center)}, {"half_w", decimal(b.half_w)}, {"half_h", decimal(b.half_h)}});
            emit(g, "tubes.json",
                 nlohmann::json({{"level", f.level}, {"l", to_string(f.angle_index)}, {"angle", decimal(f.angle)},
                                 {"translation", point_json(f.translation)}, {"variant", to_string(f.variant)},
                                 {"boxes", boxes}})
                         .dump(2) +
                     "\n");
            return 0;
        }
        if (*area) {
            const Real radius = h.table().theta_r(ar_stage);
            const auto st = besicovitch_stage(v, ar_stage, cfg.C_tube);
            const AreaEstimate a = neighborhood_area(st, radius, radius / cfg.raster_resolution, cfg.max_raster_cells, cfg.threads);
            nlohmann::json j = to_json(a);
            if (ar_stage >= 2) j["dimension_bound"] = to_json(dimension_bound_B(h.table(), ar_stage - 1, a));
            emit(g, "area.json", j.dump(2) + "\n");
            return 0;
        }
        if (*dim) {
            const DimensionEstimate d = box_dimension_x_projection(h, dm_level > 0 ? dm_level : h.depth());
            emit(g, "dimension.json", to_json(d).dump(2) + "\n");
            return 0;
        }
        if (*render) {
            RenderParams p;
            p.level = rd_level;
            p.theta = to_real(parse_rational(rd_theta));
            p.C = rd_C ? to_real(parse_rational(*rd_C)) : cfg.C_tube;
            p.cap = cfg.render_cap;
            const RenderTarget t = parse_render_target(rd_target);
            emit(g, std::string(to_string(t)) + "_" + std::to_string(rd_level) + ".svg", render_svg(v, t, p));
            return 0;
        }
        if (*pipe) {
            const std::string out = g.out.empty() ? "out" : g.out;
            if (pp_verify) {
                const auto bad = verify_manifest(out);
                for (const auto& b : bad) std::cerr << "hash mismatch: " << b << "\n";
                return code(bad.empty() ? ExitCode::ok : ExitCode::verification_failed);
            }
            const RunResult r = run_pipeline(cfg, out, std::cerr);
            return code(r.code);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(ExitCode::config_error);
    }
    return 0;
}
