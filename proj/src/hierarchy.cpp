#include "besic/hierarchy.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "besic/error.hpp"
#include "besic/format.hpp"
#include "besic/hash.hpp"
#include "besic/parallel.hpp"

namespace besic {

std::string to_string(Count v)
{
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::string table_hash(const SequenceTable& table) { return sha256_hex(to_json(table).dump()); }

LevelSet unit_level()
{
    LevelSet s;
    s.level = 1;
    RectNode r;
    r.level = 1;
    r.anchor = {0, 0};
    r.width = 1;
    r.height = 1;
    s.rects.push_back(r);
    return s;
}

Point child_offset(Point parent_anchor, const ArcSolution& sol, std::uint64_t k)
{
    if (k < 1) throw ConfigError("child index must be >= 1");
    const Real t = static_cast<Real>(k - 1) * sol.sub_angle;
    return one_minus_cis_neg(t) * (sol.center - parent_anchor);
}

Point child_anchor(Point parent_anchor, const ArcSolution& sol, std::uint64_t k)
{
    return parent_anchor + child_offset(parent_anchor, sol, k);
}

Point child_step(Point parent_anchor, const ArcSolution& sol, std::uint64_t k)
{
    if (k < 1) throw ConfigError("child index must be >= 1");
    const Real t = static_cast<Real>(k - 1) * sol.sub_angle;
    return cis_neg(t) * one_minus_cis_neg(sol.sub_angle) * (sol.center - parent_anchor);
}

Real child_step_error(Point parent_anchor, const ArcSolution& sol, Point step)
{
    return 16 * kEps * (std::abs(step) + sol.sub_angle * (std::abs(sol.center) + std::abs(parent_anchor) + 1));
}

RectNode child_rect(Point a_k, Point a_k1, Real delta_next)
{
    if (!(px(a_k1) > px(a_k)) || !(py(a_k1) > py(a_k)))
        throw ConstructionError("child anchors out of order: next anchor must be strictly above and to the right");
    RectNode r;
    r.anchor = a_k;
    r.width = delta_next;
    r.height = py(a_k1) - py(a_k);
    return r;
}

RectNode child_rect(const RectNode& parent, const ArcSolution& sol, std::uint64_t k, Real delta_next)
{
    const Point step = child_step(parent.anchor, sol, k);
    if (!(px(step) > 0) || !(py(step) > 0))
        throw ConstructionError("child anchors out of order at k = " + std::to_string(k));
    RectNode r;
    r.level = parent.level + 1;
    r.path = parent.path;
    r.path.push_back(k);
    r.anchor = child_anchor(parent.anchor, sol, k);
    r.width = delta_next;
    r.height = py(step);
    return r;
}

bool child_fits(const RectNode& parent, const ArcSolution& sol, std::uint64_t k)
{
    if (k == 0) return true;
    if (static_cast<Real>(k) * sol.sub_angle > kPi / 2) return false;
    const Point o = child_offset(parent.anchor, sol, k + 1);
    return px(o) >= 0 && px(o) <= parent.width && py(o) >= 0 && py(o) <= parent.height;
}

namespace {

// Smallest t > 0 with a component of (1 - e^{-it}) w reaching `target`,
// where the component is 2 sin^2(t/2) a + sin(t) b.
Real crossing_angle(Real a, Real b, Real target)
{
    if (!(b > 0) || !(target > 0)) return std::numeric_limits<Real>::infinity();
    Real t = target / b;
    for (int it = 0; it < 8; ++it) {
        const Real sh = std::sin(t / 2);
        const Real f = 2 * sh * sh * a + std::sin(t) * b - target;
        const Real df = std::sin(t) * a + std::cos(t) * b;
        if (!(df > 0)) break;
        const Real nt = t - f / df;
        if (!(nt > 0)) break;
        if (std::abs(nt - t) <= 4 * kEps * t) {
            t = nt;
            break;
        }
        t = nt;
    }
    return t;
}

} // namespace

std::uint64_t estimate_children(const RectNode& parent, const ArcSolution& sol)
{
    const Point w = sol.center - parent.anchor;
    // x: 2 sin^2(t/2) w_x - sin(t) w_y;  y: 2 sin^2(t/2) w_y + sin(t) w_x
    const Real tx = crossing_angle(px(w), -py(w), parent.width);
    const Real ty = crossing_angle(py(w), px(w), parent.height);
    const Real m = std::min(tx, ty) / sol.sub_angle;
    if (!(m >= 1)) return 1;
    if (m > 0x1p63L) return std::uint64_t{1} << 63;
    return static_cast<std::uint64_t>(m);
}

std::uint64_t count_children(const RectNode& parent, const ArcSolution& sol, std::uint64_t guess)
{
    if (guess < 1) guess = estimate_children(parent, sol);
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    if (child_fits(parent, sol, guess)) {
        lo = guess;
        for (std::uint64_t s = 1;; s *= 2) {
            const std::uint64_t h = lo + s;
            if (!child_fits(parent, sol, h)) {
                hi = h;
                break;
            }
            lo = h;
        }
    } else {
        hi = guess;
        for (std::uint64_t s = 1;; s *= 2) {
            const std::uint64_t l = hi > s ? hi - s : 0;
            if (child_fits(parent, sol, l)) {
                lo = l;
                break;
            }
            hi = l;
        }
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (child_fits(parent, sol, mid) ? lo : hi) = mid;
    }
    if (lo == 0) throw ConstructionError("parent rectangle at level " + std::to_string(parent.level) + " has no children");
    return lo;
}

namespace {

std::vector<std::uint64_t> parent_counts(const std::vector<RectNode>& parents, const ArcSolution& sol,
                                         std::uint64_t guess, int threads)
{
    std::vector<std::uint64_t> counts(parents.size());
    parallel_for(parents.size(), threads, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t i = b; i < e; ++i) counts[i] = count_children(parents[i], sol, guess);
    });
    return counts;
}

} // namespace

LevelSet build_level(const LevelSet& prev, const ArcSolution& sol, const SequenceTable& table, std::size_t cap,
                     int threads)
{
    const int n = prev.level;
    if (n < 1 || n >= table.depth()) throw ConfigError("build_level: level out of range");
    LevelSet next;
    next.level = n + 1;
    next.counts = parent_counts(prev.rects, sol, 0, threads);
    next.N_prev = *std::min_element(next.counts.begin(), next.counts.end());
    const Count pop = static_cast<Count>(prev.rects.size()) * next.N_prev;
    if (pop > cap)
        throw ResourceCapError("level " + std::to_string(n + 1) + " has " + to_string(pop) +
                               " rectangles, above the materialization cap " + std::to_string(cap) +
                               "; use lazy evaluation");
    const Real dn = table.delta_r(n + 1);
    const std::uint64_t N = next.N_prev;
    next.rects.resize(static_cast<std::size_t>(pop));
    parallel_for(prev.rects.size(), threads, [&](std::size_t b, std::size_t e, int) {
        for (std::size_t j = b; j < e; ++j)
            for (std::uint64_t k = 1; k <= N; ++k)
                next.rects[j * N + (k - 1)] = child_rect(prev.rects[j], sol, k, dn);
    });
    for (std::size_t i = 1; i < next.rects.size(); ++i)
        if (!(next.rects[i].left() > next.rects[i - 1].left()))
            throw ConstructionError("level " + std::to_string(n + 1) + " anchors not increasing in x at rank " +
                                    std::to_string(i + 1));
    return next;
}

Hierarchy::Hierarchy(SequenceTable table, HierarchyOptions opts) : table_(std::move(table)), opts_(opts)
{
    const int d = table_.depth();
    for (int n = 1; n < d; ++n) arcs_.push_back(solve_arc(table_, n, opts_.arc));
    counts_.assign(static_cast<std::size_t>(std::max(d, 1)), std::nullopt);
    levels_.push_back(unit_level());
    std::optional<std::string> hash;
    for (int n = 1; n < d; ++n) {
        const LevelSet& prev = levels_.back();
        auto counts = parent_counts(prev.rects, arcs_[n - 1], 0, opts_.threads);
        const std::uint64_t N = *std::min_element(counts.begin(), counts.end());
        counts_[n] = N;
        if (static_cast<Count>(prev.rects.size()) * N > opts_.materialization_cap) break;
        const std::string file = opts_.cache_dir.empty() ? std::string()
                                                         : opts_.cache_dir + "/level_" + std::to_string(n + 1) + ".bin";
        if (!file.empty()) {
            if (!hash) hash = table_hash(table_);
            auto cached = load_level_cache(file, *hash);
            if (cached && cached->level == n + 1 && cached->N_prev == N && cached->size() == prev.size() * N) {
                levels_.push_back(std::move(*cached));
                continue;
            }
        }
        levels_.push_back(build_level(prev, arcs_[n - 1], table_, opts_.materialization_cap, opts_.threads));
        if (!file.empty()) save_level_cache(file, *hash, levels_.back());
    }
}

const ArcSolution& Hierarchy::arc(int n) const
{
    if (n < 1 || n >= depth()) throw ConfigError("arc level " + std::to_string(n) + " out of range");
    return arcs_[n - 1];
}

bool Hierarchy::is_materialized(int n) const { return n >= 1 && n <= materialized_depth(); }

const LevelSet& Hierarchy::level(int n) const
{
    if (n < 1 || n > depth()) throw ConfigError("level " + std::to_string(n) + " out of range");
    if (!is_materialized(n))
        throw ResourceCapError("level " + std::to_string(n) + " is not materialized (population " +
                               to_string(population(n)) + ")");
    return levels_[n - 1];
}

bool Hierarchy::uniform_count_available(int n) const
{
    if (n < 1 || n >= depth()) return false;
    {
        std::lock_guard lock(count_mutex_);
        if (counts_[n]) return true;
    }
    if (is_materialized(n)) return true;
    if (!is_materialized(n - 1) || !uniform_count_available(n - 1)) return false;
    return static_cast<Count>(levels_[n - 2].rects.size()) * *counts_[n - 1] <= opts_.lazy_parent_cap;
}

std::uint64_t Hierarchy::uniform_count(int n) const
{
    if (n < 1 || n >= depth()) throw ConfigError("N_n defined for 1 <= n < depth");
    {
        std::lock_guard lock(count_mutex_);
        if (counts_[n]) return *counts_[n];
    }
    const std::uint64_t v = compute_uniform_count(n);
    std::lock_guard lock(count_mutex_);
    counts_[n] = v;
    return v;
}

std::uint64_t Hierarchy::compute_uniform_count(int n) const
{
    const ArcSolution& sol = arc(n);
    const std::uint64_t guess = 0;
    if (is_materialized(n)) {
        auto c = parent_counts(levels_[n - 1].rects, sol, guess, opts_.threads);
        return *std::min_element(c.begin(), c.end());
    }
    // Level n only through its parents: enumerate level-(n-1) rectangles
    // and their N_{n-1} children.
    if (!is_materialized(n - 1) || population(n) > opts_.lazy_parent_cap)
        throw ResourceCapError("N_" + std::to_string(n) + " needs " + to_string(population(n)) +
                               " parent rectangles, above the lazy evaluation cap");
    const LevelSet& grand = levels_[n - 2];
    const ArcSolution& up = arc(n - 1);
    const std::uint64_t Nup = uniform_count(n - 1);
    const Real dn = table_.delta_r(n);
    std::vector<std::uint64_t> mins(static_cast<std::size_t>(std::max(opts_.threads, 1)),
                                    std::numeric_limits<std::uint64_t>::max());
    parallel_for(grand.rects.size(), opts_.threads, [&](std::size_t b, std::size_t e, int w) {
        for (std::size_t j = b; j < e; ++j)
            for (std::uint64_t k = 1; k <= Nup; ++k) {
                const RectNode parent = child_rect(grand.rects[j], up, k, dn);
                mins[w] = std::min(mins[w], count_children(parent, sol, guess));
            }
    });
    return *std::min_element(mins.begin(), mins.end());
}

Count Hierarchy::population(int n) const
{
    if (n < 1 || n > depth()) throw ConfigError("level " + std::to_string(n) + " out of range");
    Count p = 1;
    for (int q = 1; q < n; ++q) {
        const Count N = uniform_count(q);
        if (p > std::numeric_limits<Count>::max() / N) throw ResourceCapError("population overflows 128 bits");
        p *= N;
    }
    return p;
}

void Hierarchy::check_path(const Path& path) const
{
    if (static_cast<int>(path.size()) > depth() - 1)
        throw ConfigError("path longer than the hierarchy depth");
    for (std::size_t l = 0; l < path.size(); ++l) {
        const int n = static_cast<int>(l) + 1;
        if (path[l] < 1 || path[l] > uniform_count(n))
            throw ConfigError("path index " + std::to_string(path[l]) + " out of range at level " +
                              std::to_string(n) + " (N = " + std::to_string(uniform_count(n)) + ")");
    }
}

Point Hierarchy::anchor(const Path& path) const
{
    check_path(path);
    Point p{0, 0};
    for (std::size_t l = 0; l < path.size(); ++l) p = child_anchor(p, arcs_[l], path[l]);
    return p;
}

RectNode Hierarchy::rect(const Path& path) const
{
    check_path(path);
    RectNode r = unit_level().rects.front();
    for (std::size_t l = 0; l < path.size(); ++l)
        r = child_rect(r, arcs_[l], path[l], table_.delta_r(static_cast<int>(l) + 2));
    return r;
}

std::uint64_t Hierarchy::children_of(const Path& path) const
{
    const int n = static_cast<int>(path.size()) + 1;
    return count_children(rect(path), arc(n));
}

Path Hierarchy::path_of_rank(int n, Count rank) const
{
    const Count pop = population(n);
    if (rank < 1 || rank > pop) throw ConfigError("rank out of range at level " + std::to_string(n));
    Path path(static_cast<std::size_t>(n - 1));
    Count r = rank - 1;
    for (int l = n - 1; l >= 1; --l) {
        const Count N = uniform_count(l);
        path[l - 1] = static_cast<std::uint64_t>(r % N) + 1;
        r /= N;
    }
    return path;
}

Count Hierarchy::rank_of_path(const Path& path) const
{
    check_path(path);
    Count r = 0;
    for (std::size_t l = 0; l < path.size(); ++l) r = r * uniform_count(static_cast<int>(l) + 1) + (path[l] - 1);
    return r + 1;
}

void InequalityStats::add(Real margin, Real error)
{
    const Real ratio = error > 0 ? margin / error : (margin >= 0 ? std::numeric_limits<Real>::infinity()
                                                                 : -std::numeric_limits<Real>::infinity());
    if (checked == 0) {
        worst_margin = margin;
        worst_ratio = ratio;
    } else {
        worst_margin = std::min(worst_margin, margin);
        worst_ratio = std::min(worst_ratio, ratio);
    }
    max_error = std::max(max_error, error);
    ++checked;
    switch (classify(margin, error)) {
    case Verdict::pass: ++passed; break;
    case Verdict::inconclusive: ++inconclusive; break;
    case Verdict::fail: ++failed; break;
    }
}

bool LemmaReport::passed() const
{
    if (pairs == 0) return false;
    return std::all_of(checks.begin(), checks.end(), [](const InequalityStats& s) { return s.ok(); });
}

LemmaReport verify_spacing_pairs(const SequenceTable& table, int n, const ArcSolution& sol,
                                 std::span<const ChildPair> pairs)
{
    LemmaReport rep;
    rep.level = n;
    rep.checks = {{"height"}, {"horizontal"}, {"gap"}};
    const Real c1 = to_real(table.c1);
    const Real D1 = table.Delta_r(n + 1);
    const Real t1 = table.theta_r(n + 1);
    const Real d1 = table.delta_r(n + 1);
    const Real slope = to_real(table.delta(n) / table.Delta(n) * table.Delta(n + 1));
    for (const ChildPair& pr : pairs) {
        const Point d = child_step(pr.parent.anchor, sol, pr.k);
        const Real err = child_step_error(pr.parent.anchor, sol, d);
        rep.checks[0].add(c1 * t1 - std::abs(D1 - py(d)), err + kEps * (D1 + c1 * t1));
        rep.checks[1].add(3 * c1 * t1 - std::abs(slope - px(d)), err + kEps * (slope + 3 * c1 * t1));
        rep.checks[2].add(px(d) - 3 * d1, err + kEps * d1);
        ++rep.pairs;
    }
    return rep;
}

LemmaReport verify_spacing(const Hierarchy& h, int n, std::optional<std::size_t> samples, std::uint64_t seed)
{
    const SequenceTable& t = h.table();
    const ArcSolution& sol = h.arc(n);
    std::vector<ChildPair> pairs;
    if (!samples) {
        const LevelSet& lv = h.level(n);
        const bool have_next = h.is_materialized(n + 1);
        for (std::size_t j = 0; j < lv.rects.size(); ++j) {
            const std::uint64_t Nj = have_next ? h.level(n + 1).counts[j] : count_children(lv.rects[j], sol);
            for (std::uint64_t k = 1; k <= Nj; ++k) pairs.push_back({lv.rects[j], k});
        }
        auto rep = verify_spacing_pairs(t, n, sol, pairs);
        rep.sampled = false;
        return rep;
    }
    std::mt19937_64 rng(seed);
    std::map<Path, std::pair<RectNode, std::uint64_t>> cache;
    pairs.reserve(*samples);
    for (std::size_t i = 0; i < *samples; ++i) {
        Path path(static_cast<std::size_t>(n - 1));
        for (int l = 1; l < n; ++l)
            path[l - 1] = std::uniform_int_distribution<std::uint64_t>(1, h.uniform_count(l))(rng);
        auto it = cache.find(path);
        if (it == cache.end()) {
            RectNode r = h.rect(path);
            const std::uint64_t Nj = h.children_of(path);
            it = cache.emplace(path, std::make_pair(std::move(r), Nj)).first;
        }
        const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(1, it->second.second)(rng);
        pairs.push_back({it->second.first, k});
    }
    auto rep = verify_spacing_pairs(t, n, sol, pairs);
    rep.sampled = true;
    return rep;
}

IdentityReport check_rotation_identity(const Hierarchy& h, int n, std::size_t samples, std::uint64_t seed,
                                       Real tolerance)
{
    IdentityReport rep;
    rep.n = n;
    rep.tolerance = tolerance;
    const ArcSolution& sol = h.arc(n);
    const std::uint64_t N = h.uniform_count(n);
    const Real theta = h.table().theta_r(n + 1);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        Path path(static_cast<std::size_t>(n - 1));
        for (int q = 1; q < n; ++q)
            path[q - 1] = std::uniform_int_distribution<std::uint64_t>(1, h.uniform_count(q))(rng);
        const Point p = h.anchor(path);
        const std::uint64_t l = std::uniform_int_distribution<std::uint64_t>(0, N - 1)(rng);
        const std::uint64_t k = std::uniform_int_distribution<std::uint64_t>(1, N + 1 - l)(rng);
        const Point lhs = child_anchor(p, sol, k + l);
        const Point rhs = cis_neg(static_cast<Real>(l) * theta) * child_anchor(p, sol, k) + arc_point(sol, l + 1);
        rep.max_error = std::max(rep.max_error, std::abs(lhs - rhs));
        ++rep.samples;
    }
    return rep;
}

LevelCheck check_level(const LevelSet& level, const SequenceTable& table)
{
    LevelCheck c;
    const int n = level.level;
    const Real dn = table.delta_r(n);
    const Real Dn = table.Delta_r(n);
    const auto& r = level.rects;
    if (r.empty()) return c;
    const Real tol = 64 * kEps;
    c.ordered = true;
    c.gaps_ok = true;
    c.y_nonoverlap = true;
    c.min_gap_ratio = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i].left() > r[i - 1].left() && r[i].bottom() > r[i - 1].bottom())) c.ordered = false;
        const Real gap = r[i].left() - r[i - 1].right();
        c.min_gap_ratio = std::min(c.min_gap_ratio, gap / dn);
        if (gap < 2 * dn - tol) c.gaps_ok = false;
        if (r[i - 1].top() > r[i].bottom() + tol) c.y_nonoverlap = false;
    }
    c.first_rect_ok = r[0].anchor == Point{0, 0} && r[0].width == dn && std::abs(r[0].height - Dn) <= 1e-15L * Dn;
    c.widths_ok = std::all_of(r.begin(), r.end(), [&](const RectNode& q) { return q.width == dn; });
    c.in_unit_square = std::all_of(r.begin(), r.end(), [&](const RectNode& q) {
        return q.left() >= -tol && q.bottom() >= -tol && q.right() <= 1 + tol && q.top() <= 1 + tol;
    });
    if (n >= 2) {
        const Real bound = to_real(table.c1) * table.theta_r(n);
        c.heights_ok = std::all_of(r.begin(), r.end(), [&](const RectNode& q) { return std::abs(q.height - Dn) <= bound; });
    } else {
        c.heights_ok = true;
    }
    return c;
}

CountBounds verify_counts(const Hierarchy& h, int n)
{
    const SequenceTable& t = h.table();
    CountBounds b;
    b.n = n;
    b.N = h.uniform_count(n);
    b.N_max = b.N;
    if (h.is_materialized(n + 1)) {
        const auto& cs = h.level(n + 1).counts;
        b.N_max = *std::max_element(cs.begin(), cs.end());
    } else if (h.is_materialized(n)) {
        for (const RectNode& r : h.level(n).rects) b.N_max = std::max(b.N_max, h.children_of(r.path));
    }
    const Rational ratio = t.Delta(n) / t.Delta(n + 1);
    const Rational dm1 = t.delta_or_one(n - 1);
    b.lower = ratio * (1 - t.c2 * dm1);
    b.upper = ratio * (1 + t.c2 * dm1);
    b.theta_ratio = t.theta(n) / t.theta(n + 1);
    b.sandwich = Rational(b.N) >= b.lower && Rational(b.N_max) <= b.upper;
    b.below_theta_ratio = Rational(b.N_max) < b.theta_ratio;
    b.product_lower = 1;
    for (int l = 1; l <= n - 1; ++l) b.product_lower *= 1 - t.c2 * t.delta(l);
    Count pop = h.population(n + 1);
    b.population = pop;
    b.population_ok = Rational(BigInt(to_string(pop))) * t.Delta(n + 1) >= b.product_lower;
    return b;
}

namespace {

nlohmann::json stats_json(const InequalityStats& s)
{
    return {{"name", s.name},
            {"checked", s.checked},
            {"passed", s.passed},
            {"inconclusive", s.inconclusive},
            {"failed", s.failed},
            {"worst_margin", decimal(s.worst_margin)},
            {"worst_margin_over_error", decimal(s.worst_ratio, 6)},
            {"max_error", decimal(s.max_error, 6)},
            {"ok", s.ok()}};
}

} // namespace

nlohmann::json to_json(const IdentityReport& r)
{
    return {{"n", r.n},
            {"samples", r.samples},
            {"max_error", decimal(r.max_error, 6)},
            {"tolerance", decimal(r.tolerance, 6)},
            {"passed", r.passed()}};
}

nlohmann::json to_json(const LevelCheck& c)
{
    return {{"ordered", c.ordered},         {"first_rect", c.first_rect_ok}, {"widths", c.widths_ok},
            {"gaps", c.gaps_ok},            {"y_nonoverlap", c.y_nonoverlap}, {"in_unit_square", c.in_unit_square},
            {"heights", c.heights_ok},      {"min_gap_over_delta", decimal(c.min_gap_ratio, 12)},
            {"ok", c.ok()}};
}

nlohmann::json to_json(const LemmaReport& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& s : r.checks) checks.push_back(stats_json(s));
    return {{"level", r.level}, {"pairs", r.pairs}, {"sampled", r.sampled}, {"checks", checks}, {"passed", r.passed()}};
}

nlohmann::json to_json(const CountBounds& b)
{
    return {{"n", b.n},
            {"N", b.N},
            {"N_max_parent", b.N_max},
            {"lower", to_string(b.lower)},
            {"upper", to_string(b.upper)},
            {"theta_ratio", to_string(b.theta_ratio)},
            {"sandwich", b.sandwich},
            {"below_theta_ratio", b.below_theta_ratio},
            {"population_next", to_string(b.population)},
            {"product_lower", to_string(b.product_lower)},
            {"population_bound", b.population_ok}};
}

std::string level_csv(const LevelSet& level)
{
    std::ostringstream os;
    os << "level,rank,anchor_x,anchor_y,width,height\n";
    for (std::size_t i = 0; i < level.rects.size(); ++i) {
        const RectNode& r = level.rects[i];
        os << level.level << ',' << (i + 1) << ',' << decimal(r.left()) << ',' << decimal(r.bottom()) << ','
           << decimal(r.width) << ',' << decimal(r.height) << '\n';
    }
    return os.str();
}

namespace {

constexpr char kCacheMagic[8] = {'B', 'S', 'L', 'C', 'v', '1', '\0', '\0'};

template <class T>
void put(std::ostream& os, const T& v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& is, T& v)
{
    return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_real(std::ostream& os, Real v)
{
    // Store the 80-bit payload only; the padding bytes are unspecified.
    char buf[sizeof(Real)] = {};
    std::memcpy(buf, &v, 10);
    os.write(buf, 10);
}

bool get_real(std::istream& is, Real& v)
{
    char buf[sizeof(Real)] = {};
    if (!is.read(buf, 10)) return false;
    std::memcpy(&v, buf, sizeof(Real));
    return true;
}

} // namespace

void save_level_cache(const std::string& file, const std::string& table_hash, const LevelSet& level)
{
    const std::filesystem::path dir = std::filesystem::path(file).parent_path();
    std::error_code ec;
    if (!dir.empty()) std::filesystem::create_directories(dir, ec);
    std::ofstream os(file, std::ios::binary);
    if (!os) throw ConfigError("cannot write cache " + file);
    os.write(kCacheMagic, sizeof kCacheMagic);
    put(os, static_cast<std::uint32_t>(table_hash.size()));
    os.write(table_hash.data(), static_cast<std::streamsize>(table_hash.size()));
    put(os, static_cast<std::int32_t>(level.level));
    put(os, level.N_prev);
    put(os, static_cast<std::uint64_t>(level.counts.size()));
    for (auto c : level.counts) put(os, c);
    put(os, static_cast<std::uint64_t>(level.rects.size()));
    for (const RectNode& r : level.rects) {
        put_real(os, r.left());
        put_real(os, r.bottom());
        put_real(os, r.width);
        put_real(os, r.height);
        put(os, static_cast<std::uint32_t>(r.path.size()));
        for (auto k : r.path) put(os, k);
    }
}

std::optional<LevelSet> load_level_cache(const std::string& file, const std::string& table_hash)
{
    std::ifstream is(file, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[sizeof kCacheMagic];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) return std::nullopt;
    std::uint32_t hl = 0;
    if (!get(is, hl) || hl > 1024) return std::nullopt;
    std::string h(hl, '\0');
    if (!is.read(h.data(), hl) || h != table_hash) return std::nullopt;
    LevelSet lv;
    std::int32_t level = 0;
    std::uint64_t nc = 0;
    std::uint64_t nr = 0;
    if (!get(is, level) || !get(is, lv.N_prev) || !get(is, nc)) return std::nullopt;
    lv.level = level;
    lv.counts.resize(nc);
    for (auto& c : lv.counts)
        if (!get(is, c)) return std::nullopt;
    if (!get(is, nr)) return std::nullopt;
    lv.rects.resize(nr);
    for (RectNode& r : lv.rects) {
        Real x = 0, y = 0;
        std::uint32_t pl = 0;
        if (!get_real(is, x) || !get_real(is, y) || !get_real(is, r.width) || !get_real(is, r.height) || !get(is, pl) ||
            pl > 64)
            return std::nullopt;
        r.anchor = {x, y};
        r.level = level;
        r.path.resize(pl);
        for (auto& k : r.path)
            if (!get(is, k)) return std::nullopt;
    }
    return lv;
}

} // namespace besic
