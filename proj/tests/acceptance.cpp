#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "besic/config.hpp"
#include "besic/measure.hpp"
#include "besic/pipeline.hpp"
#include "besic/report.hpp"
#include "besic/rotation.hpp"

using namespace besic;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr Real kIdentityTol = 1e-12L;
constexpr std::size_t kIdentitySamples = 10'000;
constexpr std::size_t kSpacingSamples = 10'000;
constexpr Real kAreaConstant = 153.789398193L; // frozen at first run, resolution theta_2 / 4
constexpr Real kAreaRelTol = 0.05L;
constexpr Real kTubeC = 16;
constexpr std::size_t kContainmentThetas = 100;
constexpr std::uint64_t kContainmentSeed = 7;
constexpr std::size_t kLimitThetas = 100;
constexpr std::uint64_t kLimitSeed = 11;
constexpr Real kCoveringK0 = 1;
constexpr Real kSlopeTol = 0.15L;
constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

SequenceTable strict_table(const Rational& s = 1, int depth = 3)
{
    return derive_sequences(build_schedule(s, depth), pow2(-4), Profile::strict);
}

const Hierarchy& strict()
{
    static const Hierarchy h(strict_table());
    return h;
}

const TranslationField& field()
{
    static const TranslationField v(strict());
    return v;
}

Outcome identity(const Hierarchy& h, const std::vector<int>& levels)
{
    Outcome o{true, ""};
    for (int n : levels) {
        const IdentityReport r = check_rotation_identity(h, n, kIdentitySamples, kSeed + n, kIdentityTol);
        o.pass = o.pass && r.passed();
        o.detail += fmt("n=%d max err %.2Le ", n, r.max_error);
    }
    o.detail += fmt("(tol %.0Le)", kIdentityTol);
    return o;
}

Outcome spacing(const Hierarchy& h, const std::vector<int>& exhaustive, const std::vector<int>& sampled)
{
    Outcome o{true, ""};
    auto add = [&](const LemmaReport& r) {
        Real ratio = std::numeric_limits<Real>::infinity();
        std::size_t bad = 0;
        for (const InequalityStats& s : r.checks) {
            ratio = std::min(ratio, s.worst_ratio);
            bad += s.failed + s.inconclusive;
        }
        o.pass = o.pass && r.passed();
        o.detail += fmt("n=%d %s %zu pairs, %zu not verified, min margin/err %.2Le; ", r.level,
                        r.sampled ? "sampled" : "all", r.pairs, bad, ratio);
    };
    for (int n : exhaustive) add(verify_spacing(h, n));
    for (int n : sampled) add(verify_spacing(h, n, kSpacingSamples, kSeed + n));
    return o;
}

Outcome counts(const Hierarchy& h, const std::vector<int>& levels)
{
    Outcome o{true, ""};
    for (int n : levels) {
        const CountBounds b = verify_counts(h, n);
        o.pass = o.pass && b.sandwich && b.below_theta_ratio;
        o.detail += fmt("N_%d=%llu in [%.6Lg, %.6Lg]: %s, < theta ratio %.6Lg: %s; ", n,
                        static_cast<unsigned long long>(b.N), to_real(b.lower), to_real(b.upper),
                        b.sandwich ? "yes" : "NO", to_real(b.theta_ratio), b.below_theta_ratio ? "yes" : "NO");
    }
    return o;
}

Outcome c1() { return identity(strict(), {1, 2}); }

Outcome c2() { return spacing(strict(), {1}, {2}); }

Outcome c3() { return counts(strict(), {1, 2}); }

Outcome c4()
{
    const Hierarchy& h = strict();
    const SequenceTable& t = h.table();
    const ProjectionLengths p = projection_lengths(h.level(2));
    const Real need_y = to_real(1 - t.c2 * t.delta(1));
    // Exact: |S_3| Delta_3 >= (1 - c2 delta_1)(1 - c2 delta_2).
    const Rational mass = Rational(to_string(h.population(3))) * t.Delta(3);
    const Rational need_mass = (1 - t.c2 * t.delta(1)) * (1 - t.c2 * t.delta(2));
    const bool py_ok = p.len_y - 8 * kEps >= need_y;
    const bool mass_ok = mass >= need_mass;
    return {py_ok && mass_ok,
            fmt("|P_y(S_2)| = %.12Lf >= %.12Lf: %s; |S_3| Delta_3 = %.12Lf >= %.12Lf: %s", p.len_y, need_y,
                py_ok ? "yes" : "NO", to_real(mass), to_real(need_mass), mass_ok ? "yes" : "NO")};
}

Outcome c5()
{
    const SequenceTable& t = strict().table();
    const Real radius = t.theta_r(2);
    const auto stage = besicovitch_stage(field(), 2, kTubeC);
    const AreaEstimate a = neighborhood_area(stage, radius, radius / 4);
    const Real bound = t.Delta_r(2) / t.Delta_r(1);
    const Real K = a.value / bound;
    const bool ok = std::abs(K - kAreaConstant) <= kAreaRelTol * kAreaConstant;
    return {ok, fmt("area %.9Lf in [%.6Lf, %.6Lf], K = %.6Lf vs frozen %.6Lf (+-%.0Lf%%), grid %zux%zu", a.value,
                    a.lower, a.upper, K, kAreaConstant, 100 * kAreaRelTol, a.nx, a.ny)};
}

Outcome c6()
{
    const auto thetas = random_thetas(kContainmentThetas, kContainmentSeed);
    Outcome o{true, ""};
    for (int n : {1, 2}) {
        const ContainmentReport r = check_containment(field(), n, thetas, kTubeC);
        o.pass = o.pass && r.passed();
        o.detail += fmt("n=%d %s: %s/%s anchors contained, min sufficient C %.4Lf; ", n, r.method.c_str(),
                        to_string(r.contained).c_str(), to_string(r.points).c_str(), r.min_sufficient_C);
    }
    o.detail += fmt("(C = %.0Lf)", kTubeC);
    return o;
}

Outcome c7()
{
    const SequenceTable& t = strict().table();
    const int d = t.depth();
    std::size_t inc_bad = 0, honest_bad = 0;
    Real worst_inc = 0, worst_honest = 0;
    for (Real theta : random_thetas(kLimitThetas, kLimitSeed)) {
        std::vector<LimitValue> at;
        for (int m = 1; m <= d; ++m) at.push_back(field().limit_at(theta, m));
        for (int m = 1; m < d; ++m) {
            const Real step = std::abs(at[m].v - at[m - 1].v);
            const Real slack = 64 * kEps * (1 + std::abs(at[m].v));
            const Real inc_ratio = step / (2 * t.Delta_r(m));
            const Real hon_ratio = step / at[m - 1].error_bound;
            worst_inc = std::max(worst_inc, inc_ratio);
            worst_honest = std::max(worst_honest, hon_ratio);
            if (step > 2 * t.Delta_r(m) + slack) ++inc_bad;
            if (step > at[m - 1].error_bound + slack) ++honest_bad;
        }
    }
    return {inc_bad == 0 && honest_bad == 0,
            fmt("%zu thetas, max |dv|/(2 Delta_m) = %.4Lf (%zu over), max |dv|/bound = %.4Lf (%zu over)", kLimitThetas,
                worst_inc, inc_bad, worst_honest, honest_bad)};
}

Outcome c8()
{
    Outcome o{true, ""};
    for (const Rational& s : {Rational(1, 2), Rational(1)}) {
        const Hierarchy h(strict_table(s));
        const DimensionEstimate d = box_dimension_x_projection(h, 3);
        Real maxsum = 0;
        for (const DimensionScale& sc : d.scales)
            if (sc.p >= 2) maxsum = std::max(maxsum, sc.covering_sum);
        const bool sums_ok = maxsum <= kCoveringK0;
        const bool slope_ok = d.slope && std::abs(*d.slope - d.target) <= kSlopeTol;
        o.pass = o.pass && sums_ok && slope_ok;
        o.detail += fmt("s=%s: max sum %.5Lf <= K0 %.0Lf, slope %.5Lf vs %.5Lf (|diff| %.4Lf <= %.2Lf); ",
                        to_string(s).c_str(), maxsum, kCoveringK0, d.slope ? *d.slope : Real(NAN), d.target,
                        d.residual, kSlopeTol);
    }
    return o;
}

Outcome c9()
{
    const Hierarchy h(derive_sequences(build_schedule(Rational(1), 4), pow2(-4), Profile::demo));
    const Outcome a = identity(h, {1, 2, 3});
    const Outcome b = spacing(h, {1, 2}, {3});
    const Outcome c = counts(h, {1, 2, 3});
    return {a.pass && b.pass && c.pass, "[1] " + a.detail + " [2] " + b.detail + " [3] " + c.detail};
}

Outcome c10()
{
    RunConfig cfg;
    const fs::path root = fs::temp_directory_path() / "besic_acceptance";
    fs::remove_all(root);
    std::ostringstream log;
    const RunResult ra = run_pipeline(cfg, (root / "a").string(), log);
    const RunResult rb = run_pipeline(cfg, (root / "b").string(), log);
    std::size_t compared = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
        const std::string ext = e.path().extension().string();
        if (ext != ".csv" && ext != ".json") continue;
        ++compared;
        const fs::path other = root / "b" / e.path().filename();
        if (!fs::exists(other) || read_file(e.path().string()) != read_file(other.string())) ++differ;
    }
    fs::remove_all(root);
    return {compared > 0 && differ == 0 && ra.files == rb.files,
            fmt("%zu CSV/JSON files compared, %zu differ", compared, differ)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> all = {
        {1, "rotation identity", 10, c1},     {2, "spacing lemma", 30, c2},
        {3, "count bounds", 10, c3},          {4, "projection mass", 5, c4},
        {5, "neighborhood area", 300, c5},    {6, "containment", 120, c6},
        {7, "v_theta convergence", 30, c7},   {8, "dimension schedule", 30, c8},
        {9, "demo structural suite", 120, c9}, {10, "determinism", 0, c10},
    };
    // The shared strict hierarchy is built outside the timed sections.
    strict();
    int failed = 0;
    for (const Criterion& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::string timing = c.limit_s > 0 ? fmt("%.2f s < %.0f s", secs, c.limit_s) : fmt("%.2f s", secs);
        if (!in_time) timing += " EXCEEDED";
        std::printf("%s criterion %2d %-22s | %s | %s\n", pass ? "PASS" : "FAIL", c.id, c.name, timing.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, all.size());
    return failed == 0 ? 0 : 1;
}
