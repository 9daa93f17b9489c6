#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "besic/error.hpp"
#include "besic/hierarchy.hpp"
#include "fixtures.hpp"

using namespace besic;

TEST_SUITE("hierarchy") {

TEST_CASE("N_1 by direct enumeration")
{
    const Hierarchy& h = fixtures::strict();
    const ArcSolution& sol = h.arc(1);
    std::uint64_t m = 0;
    for (std::uint64_t k = 1; k <= 32; ++k) {
        const Point next = fixtures::rotate_about(Point(0, 0), sol, k + 1);
        if (next.real() < 0 || next.real() > 1 || next.imag() < 0 || next.imag() > 1) break;
        m = k;
    }
    CHECK(m == 16);
    CHECK(h.uniform_count(1) == m);
    CHECK(h.level(2).size() == m);
}

TEST_CASE("N_2 and populations")
{
    const Hierarchy& h = fixtures::strict();
    CHECK(h.uniform_count(2) == 1012768224u);
    CHECK(h.population(1) == 1);
    CHECK(h.population(2) == 16);
    CHECK(to_string(h.population(3)) == "16204291584");
    CHECK(h.is_materialized(2));
    CHECK_FALSE(h.is_materialized(3));
    CHECK_THROWS_AS(h.level(3), ResourceCapError);
}

TEST_CASE("count_children does not depend on the starting guess")
{
    const Hierarchy& h = fixtures::strict();
    for (const RectNode& parent : h.level(2).rects) {
        const std::uint64_t n = count_children(parent, h.arc(2));
        CHECK(count_children(parent, h.arc(2), 1) == n);
        CHECK(count_children(parent, h.arc(2), 3 * n) == n);
        CHECK(child_fits(parent, h.arc(2), n));
        CHECK_FALSE(child_fits(parent, h.arc(2), n + 1));
    }
}

TEST_CASE("anchors along a path match repeated rotation")
{
    const Hierarchy& h = fixtures::strict();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Path path{rng() % h.uniform_count(1) + 1, rng() % h.uniform_count(2) + 1};
        Point p(0, 0);
        for (std::size_t l = 0; l < path.size(); ++l) p = fixtures::rotate_about(p, h.arc(static_cast<int>(l) + 1), path[l]);
        CHECK(std::abs(h.anchor(path) - p) <= 1e-14L);
    }
    CHECK(h.anchor({1, 1}) == Point(0, 0));
    CHECK(std::abs(h.anchor({5}) - arc_point(h.arc(1), 5)) <= 1e-18L);
}

TEST_CASE("rank and path are inverse")
{
    const Hierarchy& h = fixtures::strict();
    const Count pop = h.population(3);
    std::mt19937_64 rng(5);
    std::vector<Count> ranks{1, 2, pop - 1, pop};
    for (int i = 0; i < 100; ++i) ranks.push_back(static_cast<Count>(rng() % static_cast<std::uint64_t>(pop)) + 1);
    for (Count r : ranks) CHECK(h.rank_of_path(h.path_of_rank(3, r)) == r);
    CHECK(h.path_of_rank(3, 1) == Path{1, 1});
    CHECK(h.path_of_rank(3, pop) == Path{16, 1012768224});
    CHECK_THROWS_AS(h.path_of_rank(3, pop + 1), ConfigError);
    CHECK_THROWS(h.anchor({17, 1}));
}

TEST_CASE("level 2 structure")
{
    const Hierarchy& h = fixtures::strict();
    const LevelSet& s2 = h.level(2);
    const LevelCheck chk = check_level(s2, h.table());
    CHECK(chk.ok());
    CHECK(chk.min_gap_ratio >= 2);
    CHECK(s2.rects.front().anchor == Point(0, 0));
    CHECK(s2.rects.front().height == doctest::Approx(static_cast<double>(h.table().Delta_r(2))).epsilon(1e-15));
    for (const RectNode& r : s2.rects) CHECK(r.width == h.table().delta_r(2));
    CHECK(check_level(unit_level(), h.table()).ok());
}

TEST_CASE("first child pair climbs exactly Delta_{n+1}")
{
    const Hierarchy& h = fixtures::strict();
    for (int n = 1; n < h.depth(); ++n) {
        const Point d = child_step(Point(0, 0), h.arc(n), 1);
        CHECK(std::abs(d.imag() - h.table().Delta_r(n + 1)) <= 1e-12L * h.table().Delta_r(n + 1));
    }
}

TEST_CASE("step formula agrees with anchor differences")
{
    const Hierarchy& h = fixtures::strict();
    for (const RectNode& parent : h.level(2).rects)
        for (std::uint64_t k : {1ull, 1000ull, 500000000ull}) {
            const Point a = fixtures::rotate_about(parent.anchor, h.arc(2), k);
            const Point b = fixtures::rotate_about(parent.anchor, h.arc(2), k + 1);
            CHECK(std::abs(child_step(parent.anchor, h.arc(2), k) - (b - a)) <= 1e-15L);
        }
}

TEST_CASE("degenerate child rectangle")
{
    CHECK_THROWS_AS(child_rect(Point(0, 0.5L), Point(0.1L, 0.4L), 0.01L), ConstructionError);
    const RectNode r = child_rect(Point(0, 0.4L), Point(0.1L, 0.5L), 0.01L);
    CHECK(r.height == doctest::Approx(0.1));
}

TEST_CASE("spacing holds on the default hierarchy")
{
    const Hierarchy& h = fixtures::strict();
    const LemmaReport r1 = verify_spacing(h, 1);
    CHECK_FALSE(r1.sampled);
    CHECK(r1.pairs == 16);
    CHECK(r1.passed());
    const LemmaReport r2 = verify_spacing(h, 2, 2000, 3);
    CHECK(r2.sampled);
    CHECK(r2.pairs == 2000);
    CHECK(r2.passed());
}

TEST_CASE("a corrupted rotation angle breaks spacing")
{
    const Hierarchy& h = fixtures::strict();
    ArcSolution bad = h.arc(1);
    bad.sub_angle *= 4;
    std::vector<ChildPair> pairs;
    for (std::uint64_t k = 1; k <= 8; ++k) pairs.push_back({unit_level().rects[0], k});
    const LemmaReport rep = verify_spacing_pairs(h.table(), 1, bad, pairs);
    CHECK_FALSE(rep.passed());
    CHECK(rep.checks[0].failed + rep.checks[1].failed > 0);
}

TEST_CASE("count bounds")
{
    const Hierarchy& h = fixtures::strict();
    const CountBounds b2 = verify_counts(h, 2);
    CHECK(b2.sandwich);
    CHECK(b2.below_theta_ratio);
    CHECK(b2.population_ok);
    const CountBounds b1 = verify_counts(h, 1);
    CHECK(b1.sandwich);
    CHECK(b1.N == 16);
    // Level-1 heights never exceed Delta_2, so N_1 >= Delta_1 / Delta_2 = theta_1 / theta_2.
    CHECK(b1.theta_ratio == 16);
    CHECK_FALSE(b1.below_theta_ratio);
}

TEST_CASE("rotation identity")
{
    const Hierarchy& h = fixtures::strict();
    for (int n = 1; n < h.depth(); ++n) {
        const IdentityReport r = check_rotation_identity(h, n, 2000, 9);
        CHECK(r.passed());
        CHECK(r.max_error <= 1e-12L);
    }
}

TEST_CASE("level csv")
{
    const Hierarchy& h = fixtures::strict();
    std::istringstream in(level_csv(h.level(2)));
    std::string line;
    std::getline(in, line);
    CHECK(line == "level,rank,anchor_x,anchor_y,width,height");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 16);
}

TEST_CASE("level cache round trip")
{
    const Hierarchy& h = fixtures::strict();
    const auto dir = std::filesystem::temp_directory_path() / "besic_cache_test";
    std::filesystem::create_directories(dir);
    const std::string file = (dir / "level_2.bin").string();
    const std::string key = table_hash(h.table());
    save_level_cache(file, key, h.level(2));
    const auto back = load_level_cache(file, key);
    REQUIRE(back.has_value());
    REQUIRE(back->size() == h.level(2).size());
    for (std::size_t i = 0; i < back->size(); ++i) {
        CHECK(back->rects[i].anchor == h.level(2).rects[i].anchor);
        CHECK(back->rects[i].height == h.level(2).rects[i].height);
        CHECK(back->rects[i].path == h.level(2).rects[i].path);
    }
    CHECK_FALSE(load_level_cache(file, table_hash(fixtures::strict_table(Rational(1, 2)))).has_value());
    std::filesystem::remove_all(dir);
}

TEST_CASE("hierarchy built through the cache is identical")
{
    const auto dir = std::filesystem::temp_directory_path() / "besic_cache_test2";
    std::filesystem::remove_all(dir);
    HierarchyOptions opts;
    opts.cache_dir = dir.string();
    const Hierarchy first(fixtures::strict_table(), opts);
    const Hierarchy second(fixtures::strict_table(), opts);
    CHECK(level_csv(first.level(2)) == level_csv(second.level(2)));
    CHECK(level_csv(first.level(2)) == level_csv(fixtures::strict().level(2)));
    std::filesystem::remove_all(dir);
}

}
