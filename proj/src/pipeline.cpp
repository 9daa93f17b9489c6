#include "besic/pipeline.hpp"

#include <functional>

#include "besic/format.hpp"
#include "besic/measure.hpp"
#include "besic/report.hpp"
#include "besic/svg.hpp"

namespace besic {

namespace {

// Re-throws module errors with the failing stage in the message.
void stage(const std::string& name, std::ostream& log, const std::function<void()>& body)
{
    log << "[" << name << "]\n";
    try {
        body();
    } catch (const DepthUnreachable& e) {
        throw DepthUnreachable(name + ": " + e.what(), e.max_depth());
    } catch (const Error& e) {
        throw Error(name + ": " + e.what(), e.code());
    }
}

constexpr std::size_t kExhaustivePairs = 20'000'000;
constexpr std::size_t kTableEntries = 4097;

} // namespace

RunResult run_pipeline(const RunConfig& cfg, const std::string& out_dir, std::ostream& log)
{
    RunResult res;
    res.demo = cfg.profile == Profile::demo;
    ManifestWriter w(out_dir);
    auto fail = [&](const std::string& what) {
        res.failures.push_back(what);
        log << "  FAIL " << what << "\n";
    };
    if (res.demo) log << kDemoBanner << "\n";

    SequenceTable table;
    stage("sequence", log, [&] {
        table = make_table(cfg);
        const auto rep = validate_sequences(table);
        w.write_json("sequence.json", to_json(table));
        w.write_json("constraints.json", to_json(rep));
        for (const auto& c : rep.checks)
            if (!c.passed && !c.skipped) fail("constraint " + c.name + " (level " + std::to_string(c.level) + ")");
    });

    std::unique_ptr<Hierarchy> hp;
    stage("hierarchy", log, [&] {
        hp = std::make_unique<Hierarchy>(table, hierarchy_options(cfg));
        nlohmann::json arcs = nlohmann::json::array();
        for (const auto& a : hp->arcs()) arcs.push_back(to_json(a));
        w.write_json("arcs.json", arcs);
        nlohmann::json checks = nlohmann::json::array();
        for (int n = 1; n <= hp->materialized_depth(); ++n) {
            const LevelSet& lv = hp->level(n);
            w.write("level_" + std::to_string(n) + ".csv", level_csv(lv));
            const LevelCheck c = check_level(lv, table);
            nlohmann::json j = to_json(c);
            j["level"] = n;
            j["rects"] = lv.size();
            checks.push_back(j);
            if (!c.ok()) fail("level invariants (level " + std::to_string(n) + ")");
        }
        w.write_json("level_checks.json", checks);
    });
    const Hierarchy& h = *hp;
    const int d = h.depth();

    stage("counts", log, [&] {
        nlohmann::json out = nlohmann::json::array();
        for (int n = 1; n < d; ++n) {
            if (!h.uniform_count_available(n)) continue;
            const CountBounds b = verify_counts(h, n);
            out.push_back(to_json(b));
            const std::string lv = " (n = " + std::to_string(n) + ")";
            if (!b.sandwich) fail("count sandwich" + lv);
            if (!b.below_theta_ratio) fail("count bound N_n < theta_n/theta_{n+1}" + lv);
            if (!b.population_ok) fail("population lower bound" + lv);
        }
        w.write_json("counts.json", out);
    });

    stage("spacing", log, [&] {
        for (int n = 1; n < d; ++n) {
            bool reachable = true;
            for (int q = 1; q < n; ++q) reachable = reachable && h.uniform_count_available(q);
            if (!reachable) continue;
            const bool exhaustive = h.is_materialized(n) && h.uniform_count_available(n) &&
                                    h.population(n) * h.uniform_count(n) <= kExhaustivePairs;
            const LemmaReport r = exhaustive ? verify_spacing(h, n)
                                             : verify_spacing(h, n, cfg.spacing_samples, cfg.seed + n);
            w.write_json("lemma_spacing_" + std::to_string(n) + ".json", to_json(r));
            if (!r.passed()) fail("spacing lemma (n = " + std::to_string(n) + ")");
        }
    });

    stage("rotation identity", log, [&] {
        nlohmann::json out = nlohmann::json::array();
        for (int n = 1; n < d; ++n) {
            if (!h.uniform_count_available(n)) continue;
            const IdentityReport r = check_rotation_identity(h, n, cfg.identity_samples, cfg.seed + 100 + n);
            out.push_back(to_json(r));
            if (!r.passed()) fail("rotation identity (n = " + std::to_string(n) + ")");
        }
        w.write_json("rotation_identity.json", out);
    });

    stage("projection", log, [&] {
        nlohmann::json out = nlohmann::json::array();
        for (int n = 1; n <= h.materialized_depth(); ++n) {
            const ProjectionLengths p = projection_lengths(h.level(n));
            nlohmann::json j = to_json(p);
            if (n >= 2) {
                Rational bound = 1;
                for (int l = 1; l <= n - 1; ++l) bound *= 1 - table.c2 * table.delta(l);
                const bool ok = p.len_y + 64 * kEps >= to_real(bound);
                j["len_y_lower_bound"] = to_string(bound);
                j["len_y_bound_ok"] = ok;
                if (!ok) fail("projection mass (level " + std::to_string(n) + ")");
            }
            out.push_back(j);
        }
        w.write_json("projection.json", out);
    });

    if (!res.demo && d >= 2) {
        const TranslationField v(h);
        stage("translation", log, [&] {
            for (int n = 1; n <= d; ++n) {
                const long e = table.theta_exponent(n);
                if (e > 12 || (std::size_t{1} << e) + 1 > kTableEntries) continue;
                w.write("vtheta_" + std::to_string(n) + ".csv", translation_csv(table, v.table(n)));
            }
            nlohmann::json bounds = nlohmann::json::array();
            for (int n = 1; n < d; ++n) bounds.push_back(to_json(v.v_bound(n, 1000, cfg.seed + 150 + n)));
            nlohmann::json lim = nlohmann::json::array();
            bool inc_ok = true, honest = true;
            Real worst_inc = 0, worst_honest = 0;
            for (Real th : random_thetas(cfg.limit_thetas, cfg.seed + 200)) {
                const LimitValue full = v.limit_at(th, d);
                for (int m = 1; m < d; ++m) {
                    const Real inc = std::abs(full.partials[m] - full.partials[m - 1]);
                    const Real r = inc / (2 * table.Delta_r(m));
                    worst_inc = std::max(worst_inc, r);
                    if (r > 1) inc_ok = false;
                    const LimitValue lm = v.limit_at(th, m);
                    const Real hr = inc / lm.error_bound;
                    worst_honest = std::max(worst_honest, hr);
                    if (hr > 1) honest = false;
                }
                lim.push_back({{"theta", decimal(th)}, {"v", point_json(full.v)},
                               {"error_bound", decimal(full.error_bound, 6)}});
            }
            w.write_json("vtheta_report.json", {{"bounds", bounds},
                                                {"limits", lim},
                                                {"max_increment_over_2Delta_m", decimal(worst_inc, 12)},
                                                {"max_refinement_over_bound", decimal(worst_honest, 12)},
                                                {"increments_ok", inc_ok},
                                                {"bound_honest", honest}});
            if (!inc_ok) fail("v_theta increment bound");
            if (!honest) fail("v_theta limit error bound");
        });

        stage("containment", log, [&] {
            nlohmann::json out = nlohmann::json::array();
            const auto thetas = random_thetas(cfg.containment_thetas, cfg.seed + 300);
            for (int n = 1; n <= std::min(2, d - 1); ++n) {
                const ContainmentReport r = check_containment(v, n, thetas, cfg.C_tube);
                out.push_back(to_json(r));
                if (!r.passed()) fail("containment (n = " + std::to_string(n) + ")");
            }
            w.write_json("containment.json", out);
        });

        stage("area", log, [&] {
            const Real radius = table.theta_r(2);
            const Real res_cell = radius / cfg.raster_resolution;
            const auto st = besicovitch_stage(v, 2, cfg.C_tube);
            const AreaEstimate a = neighborhood_area(st, radius, res_cell, cfg.max_raster_cells, cfg.threads);
            const TubeFamily f0 = tube_family(v, 1, 0, cfg.C_tube, TubeVariant::T_prime);
            const TubeFamily f1 = tube_family(v, 1, 1, cfg.C_tube, TubeVariant::T_prime);
            const AreaEstimate loss = pairwise_overlap_loss(f1, f0, res_cell, cfg.max_raster_cells, cfg.threads);
            const Real loss_ref = to_real(table.Delta(2) / table.Delta(1) * table.theta(2));
            w.write_json("area.json", {{"stage", 2},
                                       {"radius", decimal(radius, 12)},
                                       {"neighborhood", to_json(a)},
                                       {"overlap_loss", to_json(loss)},
                                       {"overlap_loss_reference", decimal(loss_ref, 12)},
                                       {"overlap_loss_constant", decimal(loss.value / loss_ref, 12)}});
            w.write_json("dimension_bound.json", to_json(dimension_bound_B(table, 1, a)));
        });

        if (d >= 3)
            stage("dimension", log, [&] {
                const DimensionEstimate e = box_dimension_x_projection(h, d);
                w.write_json("dimension.json", to_json(e));
                w.write("dimension.csv", dimension_csv(e));
            });

        stage("render", log, [&] {
            RenderParams p;
            p.cap = cfg.render_cap;
            p.C = cfg.C_tube;
            for (int n = 1; n < d; ++n) {
                p.level = n;
                w.write("arc_diagram_" + std::to_string(n) + ".svg", render_svg(v, RenderTarget::arc_diagram, p));
            }
            const int top = std::min(h.materialized_depth(), 2);
            p.level = top;
            w.write("level_set_" + std::to_string(top) + ".svg", render_svg(v, RenderTarget::level_set, p));
            p.level = 1;
            w.write("tube_stage_1.svg", render_svg(v, RenderTarget::tube_stage, p));
            p.level = top;
            p.theta = 0.3L;
            w.write("gamma_theta_" + std::to_string(top) + ".svg", render_svg(v, RenderTarget::gamma_theta, p));
        });
    } else if (d >= 2) {
        const TranslationField v(h);
        stage("render", log, [&] {
            RenderParams p;
            p.cap = cfg.render_cap;
            for (int n = 1; n < d; ++n) {
                p.level = n;
                w.write("arc_diagram_" + std::to_string(n) + ".svg", render_svg(v, RenderTarget::arc_diagram, p));
            }
            for (int n = 2; n <= h.materialized_depth(); ++n) {
                if (h.level(n).size() > cfg.render_cap) break;
                p.level = n;
                w.write("level_set_" + std::to_string(n) + ".svg", render_svg(v, RenderTarget::level_set, p));
            }
        });
    }

    res.code = res.failures.empty() ? ExitCode::ok : ExitCode::verification_failed;
    for (const auto& f : w.entries()) res.files.push_back(f["name"]);
    nlohmann::json extra = {{"config", to_json(cfg)},
                            {"profile", to_string(cfg.profile)},
                            {"failures", res.failures},
                            {"exit_code", static_cast<int>(res.code)}};
    if (res.demo) extra["banner"] = kDemoBanner;
    w.finish(extra);
    log << (res.failures.empty() ? "all checks passed" : std::to_string(res.failures.size()) + " check(s) failed")
        << "\n";
    return res;
}

} // namespace besic
