#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "besic/arc.hpp"
#include "besic/sequence.hpp"

namespace besic {

using Count = unsigned __int128;
std::string to_string(Count v);

// Child indices [k_1, ..., k_{n-1}] leading from the unit square to a
// level-n rectangle.
using Path = std::vector<std::uint64_t>;

struct RectNode {
    int level = 1;
    Path path;
    Point anchor;   // bottom-left corner
    Real width = 1; // delta_n
    Real height = 1;

    Real left() const { return anchor.real(); }
    Real right() const { return anchor.real() + width; }
    Real bottom() const { return anchor.imag(); }
    Real top() const { return anchor.imag() + height; }
};

struct LevelSet {
    int level = 1;
    std::vector<RectNode> rects; // ordered by anchor x, rank = index + 1
    std::uint64_t N_prev = 0;    // uniform child count used to build this level
    std::vector<std::uint64_t> counts; // N_{n-1,j} for every parent j

    std::size_t size() const { return rects.size(); }
};

LevelSet unit_level();

// Hash of the table's JSON form; keys the level cache.
std::string table_hash(const SequenceTable& table);

// p_{n,j,k} - p_{n,j} = (1 - e^{-i(k-1)theta}) (alpha - p_{n,j})
Point child_offset(Point parent_anchor, const ArcSolution& sol, std::uint64_t k);

// p_{n,j,k} = alpha (1 - e^{-i(k-1)theta}) + e^{-i(k-1)theta} p_{n,j}
Point child_anchor(Point parent_anchor, const ArcSolution& sol, std::uint64_t k);

// p_{n,j,k+1} - p_{n,j,k} = e^{-i(k-1)theta} (1 - e^{-i theta}) (alpha - p_{n,j})
Point child_step(Point parent_anchor, const ArcSolution& sol, std::uint64_t k);

// Rounding bound for child_step.
Real child_step_error(Point parent_anchor, const ArcSolution& sol, Point step);

// Axis-parallel rectangle [a_k.x, a_k.x + delta_next] x [a_k.y, a_k1.y].
RectNode child_rect(Point a_k, Point a_k1, Real delta_next);

// Q_{n,j,k} built with the cancellation-free step formula for its height.
RectNode child_rect(const RectNode& parent, const ArcSolution& sol, std::uint64_t k, Real delta_next);

// Whether p_{n,j,k+1} lies in the parent rectangle.
bool child_fits(const RectNode& parent, const ArcSolution& sol, std::uint64_t k);

// Closed-form estimate of N_{n,j} from the angles at which the anchor
// path leaves the parent through its right or top side.
std::uint64_t estimate_children(const RectNode& parent, const ArcSolution& sol);

// N_{n,j}: the largest m with Q_{n,j,1..m} inside the parent, by galloping
// from `guess` (0: use estimate_children) and then bisecting.
std::uint64_t count_children(const RectNode& parent, const ArcSolution& sol, std::uint64_t guess = 0);

struct HierarchyOptions {
    std::size_t materialization_cap = 2'000'000;
    std::uint64_t lazy_parent_cap = 50'000'000;
    ArcSolveOptions arc;
    int threads = 1;
    std::string cache_dir; // when set, stored levels are read from / written to level_<n>.bin
};

// S_{n+1} from S_n: N_n = min_j N_{n,j} children per parent, ranked by x.
LevelSet build_level(const LevelSet& prev, const ArcSolution& sol, const SequenceTable& table,
                     std::size_t cap = 2'000'000, int threads = 1);

// The rectangle generations S_1..S_depth: shallow levels are stored,
// deeper ones exist through paths and closed-form anchors.
class Hierarchy {
public:
    explicit Hierarchy(SequenceTable table, HierarchyOptions opts = {});

    const SequenceTable& table() const { return table_; }
    const HierarchyOptions& options() const { return opts_; }
    int depth() const { return table_.depth(); }

    const ArcSolution& arc(int n) const;
    const std::vector<ArcSolution>& arcs() const { return arcs_; }

    bool is_materialized(int n) const;
    int materialized_depth() const { return static_cast<int>(levels_.size()); }
    const LevelSet& level(int n) const;

    // N_n for 1 <= n < depth; computed on first use.
    std::uint64_t uniform_count(int n) const;
    bool uniform_count_available(int n) const;

    // |S_n| = prod_{q < n} N_q.
    Count population(int n) const;

    Point anchor(const Path& path) const;
    RectNode rect(const Path& path) const;

    // N_{n,j} for the level-n rectangle at `path`.
    std::uint64_t children_of(const Path& path) const;

    Path path_of_rank(int n, Count rank) const;
    Count rank_of_path(const Path& path) const;

private:
    void check_path(const Path& path) const;
    std::uint64_t compute_uniform_count(int n) const;

    SequenceTable table_;
    HierarchyOptions opts_;
    std::vector<ArcSolution> arcs_;
    std::vector<LevelSet> levels_;
    mutable std::mutex count_mutex_;
    mutable std::vector<std::optional<std::uint64_t>> counts_;
};

// One inequality family checked over many child pairs.
struct InequalityStats {
    std::string name;
    std::size_t checked = 0;
    std::size_t passed = 0;
    std::size_t inconclusive = 0;
    std::size_t failed = 0;
    Real worst_margin = 0;     // min over pairs of bound - |deviation|
    Real worst_ratio = 0;      // min over pairs of margin / rounding bound
    Real max_error = 0;        // max rounding bound

    void add(Real margin, Real error);
    bool ok() const { return failed == 0 && inconclusive == 0; }
};

struct LemmaReport {
    int level = 0; // lemma index n: pairs of children of level-n rectangles
    std::size_t pairs = 0;
    bool sampled = false;
    std::vector<InequalityStats> checks;

    bool passed() const;
};

struct ChildPair {
    RectNode parent;
    std::uint64_t k = 1; // pair (p_k, p_{k+1})
};

LemmaReport verify_spacing_pairs(const SequenceTable& table, int n, const ArcSolution& sol,
                                 std::span<const ChildPair> pairs);

// Exhaustive over all parents of a stored level when `samples` is empty,
// otherwise `samples` seeded-random pairs with lazily evaluated parents.
LemmaReport verify_spacing(const Hierarchy& h, int n, std::optional<std::size_t> samples = std::nullopt,
                           std::uint64_t seed = 1);

// Structural invariants of a stored level: ordering, first rectangle,
// widths, disjoint x-projections with gaps >= 2 delta_n, non-overlapping
// y-projections, containment in the unit square.
struct LevelCheck {
    bool ordered = false;
    bool first_rect_ok = false;
    bool widths_ok = false;
    bool gaps_ok = false;
    bool y_nonoverlap = false;
    bool in_unit_square = false;
    bool heights_ok = false; // |height - Delta_n| <= c1 theta_n for n >= 2
    Real min_gap_ratio = 0;  // min gap / delta_n

    bool ok() const { return ordered && first_rect_ok && widths_ok && gaps_ok && y_nonoverlap && in_unit_square && heights_ok; }
};

LevelCheck check_level(const LevelSet& level, const SequenceTable& table);

struct CountBounds {
    int n = 0;
    std::uint64_t N = 0;     // min over parents
    std::uint64_t N_max = 0; // max over parents
    Rational lower;       // Delta_n / Delta_{n+1} (1 - c2 delta_{n-1})
    Rational upper;       // Delta_n / Delta_{n+1} (1 + c2 delta_{n-1})
    Rational theta_ratio; // theta_n / theta_{n+1}
    bool sandwich = false;
    bool below_theta_ratio = false;
    Count population = 0;    // |S_{n+1}|
    Rational product_lower;  // prod_{l < n} (1 - c2 delta_l)
    bool population_ok = false; // |S_{n+1}| Delta_{n+1} >= product_lower
};

CountBounds verify_counts(const Hierarchy& h, int n);

// p_{n,j,k+l} = e^{-il theta_{n+1}} p_{n,j,k} + p_{n,1,l+1} over random
// (j, k, l) with k + l <= N_n + 1.
struct IdentityReport {
    int n = 0;
    std::size_t samples = 0;
    Real max_error = 0;
    Real tolerance = 0;

    bool passed() const { return samples > 0 && max_error <= tolerance; }
};

IdentityReport check_rotation_identity(const Hierarchy& h, int n, std::size_t samples, std::uint64_t seed,
                                       Real tolerance = 1e-12L);

nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const LevelCheck& c);
nlohmann::json to_json(const LemmaReport& r);
nlohmann::json to_json(const CountBounds& b);

// CSV columns: level,rank,anchor_x,anchor_y,width,height
std::string level_csv(const LevelSet& level);

// Binary cache of a stored level, keyed by a hash of the table.
void save_level_cache(const std::string& file, const std::string& table_hash, const LevelSet& level);
std::optional<LevelSet> load_level_cache(const std::string& file, const std::string& table_hash);

} // namespace besic
