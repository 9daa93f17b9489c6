#include "besic/rotation.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>

#include "besic/error.hpp"
#include "besic/format.hpp"
#include "besic/parallel.hpp"

namespace besic {

namespace {

constexpr long kMaxGridExponent = 126;
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;

Real count_to_real(Count c) { return static_cast<Real>(c); }

Count pow2_count(long e) { return Count{1} << e; }

long grid_exponent(const SequenceTable& t, int level)
{
    const long e = t.theta_exponent(level);
    if (e > kMaxGridExponent)
        throw ResourceCapError("theta_" + std::to_string(level) + " = 2^-" + std::to_string(e) +
                               " is below the 128-bit angle grid");
    return e;
}

} // namespace

GridAngle grid_angle(const SequenceTable& table, int level, Count index)
{
    if (level < 1 || level > table.depth()) throw ConfigError("grid level out of range");
    const long e = grid_exponent(table, level);
    if (index > pow2_count(e)) throw ConfigError("grid angle above 1");
    return {level, index};
}

Real angle_value(const SequenceTable& table, const GridAngle& a)
{
    return std::ldexp(count_to_real(a.index), -static_cast<int>(grid_exponent(table, a.level)));
}

Rational angle_exact(const SequenceTable& table, const GridAngle& a)
{
    return Rational(BigInt(to_string(a.index))) * pow2(-grid_exponent(table, a.level));
}

GridAngle coarsen(const SequenceTable& table, const GridAngle& a, int m)
{
    if (m < 1 || m > a.level) throw ConfigError("coarsen: level out of range");
    const long shift = grid_exponent(table, a.level) - grid_exponent(table, m);
    return {m, a.index >> shift};
}

const char* to_string(VCase c)
{
    switch (c) {
    case VCase::base: return "base";
    case VCase::case1: return "case1";
    case VCase::case2: return "case2";
    case VCase::case3: return "case3";
    }
    return "?";
}

const char* to_string(TubeVariant v) { return v == TubeVariant::T ? "T" : "T_prime"; }

TranslationField::TranslationField(const Hierarchy& h) : h_(h)
{
    t_.assign(static_cast<std::size_t>(h.depth()) + 1, 0);
    for (int m = 1; m <= h.depth(); ++m) t_[m] = h.table().theta_exponent(m);
}

TranslationValue TranslationField::value(const GridAngle& a) const
{
    if (a.level < 1 || a.level > h_.depth()) throw ConfigError("grid level out of range");
    if (t_[a.level] > kMaxGridExponent) throw ResourceCapError("angle grid exceeds 128 bits");
    if (a.index > pow2_count(t_[a.level])) throw ConfigError("grid angle above 1");
    TranslationValue out;
    out.v = {0, 0};
    for (int l = 2; l <= a.level; ++l) {
        const Count coarse = a.index >> (t_[a.level] - t_[l - 1]);
        const Count fine = a.index >> (t_[a.level] - t_[l]);
        const Count K = fine - (coarse << (t_[l] - t_[l - 1]));
        if (K == 0) continue;
        const std::uint64_t N = h_.uniform_count(l - 1);
        const Count q = K / N;
        const auto k = static_cast<std::uint64_t>(K % N);
        const Real theta_l = h_.table().theta_r(l);
        // v_{K theta_l} = e^{-i q N theta_l} p_{l-1,1,k+1}
        const Point w = rotate(arc_point(h_.arc(l - 1), k + 1), count_to_real(q * N) * theta_l);
        const Real base = std::ldexp(count_to_real(coarse), -static_cast<int>(t_[l - 1]));
        out.v += rotate(w, base);
        out.tag = coarse > 0 ? VCase::case3 : (q > 0 ? VCase::case2 : VCase::case1);
    }
    return out;
}

Real TranslationField::tail_bound(int m) const
{
    const SequenceTable& t = h_.table();
    const int d = t.depth();
    const Real c = to_real(t.c);
    Real sum = 0;
    for (int j = std::max(m, 1); j < d; ++j) sum += 2 * t.Delta_r(j);
    sum += 2 * t.Delta_r(d) / (1 - c);
    return sum;
}

LimitValue TranslationField::limit_at(Real theta, int m) const
{
    if (!(theta >= 0 && theta <= 1)) throw ConfigError("theta must lie in [0, 1]");
    if (m < 1 || m > h_.depth()) throw ConfigError("limit level out of range");
    LimitValue out;
    for (int l = 1; l <= m; ++l) {
        if (t_[l] > kMaxGridExponent) throw ResourceCapError("angle grid exceeds 128 bits");
        const Real scaled = std::floor(std::ldexp(theta, static_cast<int>(t_[l])));
        const Count idx = static_cast<Count>(scaled);
        out.partials.push_back(value({l, idx}).v);
    }
    out.v = out.partials.back();
    out.level = m;
    out.error_bound = tail_bound(m) + 16 * kEps * m * (1 + std::abs(out.v));
    return out;
}

LimitValue TranslationField::limit(Real theta, Real tol) const
{
    if (!(tol > 0)) throw ConfigError("limit tolerance must be positive");
    int m = 1;
    while (m < h_.depth() && !(tail_bound(m) < tol)) ++m;
    LimitValue out = limit_at(theta, m);
    out.converged = out.error_bound < tol;
    return out;
}

const TranslationTable& TranslationField::table(int n) const
{
    std::lock_guard lock(mutex_);
    auto it = tables_.find(n);
    if (it != tables_.end()) return it->second;
    if (n < 1 || n > h_.depth()) throw ConfigError("table level out of range");
    if (t_[n] > 62 || (std::size_t{1} << t_[n]) + 1 > kMaxTableEntries)
        throw ResourceCapError("v table at level " + std::to_string(n) + " has 2^" + std::to_string(t_[n]) +
                               " + 1 entries, above the cap");
    TranslationTable tab;
    tab.level = n;
    tab.grid_step = h_.table().theta_r(n);
    const Count L = pow2_count(t_[n]);
    for (Count j = 0; j <= L; ++j) {
        const auto tv = value({n, j});
        tab.entries.push_back({j, tv.v, tv.tag});
    }
    return tables_.emplace(n, std::move(tab)).first->second;
}

VBound TranslationField::v_bound(int n, std::size_t samples, std::uint64_t seed) const
{
    const int d = h_.depth();
    if (n < 1 || n > d) throw ConfigError("v_bound level out of range");
    VBound b;
    b.n = n;
    const long span = t_[d] - t_[n];
    if (span > 126) throw ResourceCapError("angle grid exceeds 128 bits");
    const Count limit = pow2_count(span); // theta < theta_n  <=>  index < limit at level d
    std::mt19937_64 rng(seed);
    const Real tn = h_.table().theta_r(n);
    const Real Dn = h_.table().Delta_r(n);
    for (std::size_t i = 0; i < samples; ++i) {
        const Count r = (static_cast<Count>(rng()) << 64) | rng();
        const Count idx = r % limit;
        const Point v = value({d, idx}).v;
        b.K_x = std::max(b.K_x, std::abs(px(v)) / tn);
        b.K_y = std::max(b.K_y, std::abs(py(v)) / Dn);
        ++b.samples;
    }
    return b;
}

Point translation_vector_recursive(const Hierarchy& h, const GridAngle& a)
{
    const SequenceTable& t = h.table();
    if (a.level == 1 || a.index == 0) return {0, 0};
    const int n = a.level - 1;
    const Count ratio = pow2_count(t.theta_exponent(a.level) - t.theta_exponent(n));
    const Count j = a.index / ratio;
    const Count K = a.index % ratio;
    if (j == 0) {
        const std::uint64_t N = h.uniform_count(n);
        const Count q = K / N;
        const auto k = static_cast<std::uint64_t>(K % N);
        const Point p = child_anchor(Point{0, 0}, h.arc(n), k + 1);
        if (q == 0) return p;
        return cis_neg(static_cast<Real>(q * N) * t.theta_r(n + 1)) * p;
    }
    const Point inner = translation_vector_recursive(h, {a.level, K});
    return cis_neg(static_cast<Real>(j) * t.theta_r(n)) * inner + translation_vector_recursive(h, {n, j});
}

std::vector<Point> gamma_theta_anchors(const LevelSet& level, Real theta, Point v)
{
    std::vector<Point> out;
    out.reserve(level.rects.size());
    const Point r = cis_neg(theta);
    for (const RectNode& q : level.rects) out.push_back(r * q.anchor + v);
    return out;
}

bool RotatedBox::contains(Point z, Real margin) const
{
    const Point u = local(z);
    return std::abs(px(u)) <= half_w + margin && std::abs(py(u)) <= half_h + margin;
}

std::array<Point, 4> RotatedBox::corners() const
{
    const Point r = cis_neg(angle);
    return {center + r * Point{-half_w, -half_h}, center + r * Point{half_w, -half_h},
            center + r * Point{half_w, half_h}, center + r * Point{-half_w, half_h}};
}

TubeFamily tube_family(const TranslationField& v, int n, Count l, Real C, TubeVariant variant)
{
    const Hierarchy& h = v.hierarchy();
    const SequenceTable& t = h.table();
    const int lv = variant == TubeVariant::T ? n : n + 1;
    if (lv < 1 || lv > h.depth()) throw ConfigError("tube level out of range");
    const LevelSet& level = h.level(lv);
    const GridAngle a = grid_angle(t, lv, l);
    TubeFamily f;
    f.level = n;
    f.angle_index = l;
    f.angle = angle_value(t, a);
    f.translation = v(a);
    f.variant = variant;
    f.C = C;
    const Real scale = variant == TubeVariant::T ? C : 2 * C;
    const Real hw = scale * t.theta_r(lv);
    const Real hh = scale * t.Delta_r(lv);
    const Point r = cis_neg(f.angle);
    f.tubes.reserve(level.rects.size());
    for (const RectNode& q : level.rects) f.tubes.push_back({r * q.anchor + f.translation, f.angle, hw, hh});
    return f;
}

std::vector<TubeFamily> besicovitch_stage(const TranslationField& v, int n, Real C, std::size_t cap)
{
    const Hierarchy& h = v.hierarchy();
    const long e = h.table().theta_exponent(n);
    if (e > 40) throw ResourceCapError("stage " + std::to_string(n) + " has 2^" + std::to_string(e) + " families");
    const Count L = pow2_count(e);
    const Count boxes = (L + 1) * h.population(n);
    if (boxes > cap)
        throw ResourceCapError("stage " + std::to_string(n) + " has " + to_string(boxes) + " tubes, above the cap " +
                               std::to_string(cap));
    std::vector<TubeFamily> out;
    for (Count l = 0; l <= L; ++l) out.push_back(tube_family(v, n, l, C, TubeVariant::T));
    return out;
}

Real required_constant(Point z, const RotatedBox& box, Real theta_n, Real Delta_n)
{
    const Point u = box.local(z);
    return std::max(std::abs(px(u)) / theta_n, std::abs(py(u)) / Delta_n);
}

namespace {

struct Extremes {
    Real x = 0;
    Real y = 0;
};

// Channels of loc(k) = A - e^{-i psi_k} W with psi_k = phi + (k-1) theta':
// candidates are the endpoints and the integers around critical angles.
void add_critical(std::vector<std::uint64_t>& ks, Real psi0, Real step, std::uint64_t N, Real crit)
{
    const Real span = static_cast<Real>(N - 1) * step;
    for (int m = -4; m <= 4; ++m) {
        const Real psi = crit + m * kPi;
        const Real rel = psi - psi0;
        if (rel < 0 || rel > span) continue;
        const Real kr = 1 + rel / step;
        const auto k0 = static_cast<std::uint64_t>(std::floor(kr));
        for (std::uint64_t k : {k0, k0 + 1})
            if (k >= 1 && k <= N) ks.push_back(k);
    }
}

} // namespace

ContainmentReport check_containment(const TranslationField& v, int n, const std::vector<Real>& thetas, Real C)
{
    const Hierarchy& h = v.hierarchy();
    const SequenceTable& t = h.table();
    if (n < 1 || n >= h.depth()) throw ConfigError("containment level out of range");
    ContainmentReport rep;
    rep.n = n;
    rep.C = C;
    const Real tn = t.theta_r(n);
    const Real Dn = t.Delta_r(n);
    const long e = t.theta_exponent(n);
    const Count L = pow2_count(e);
    const bool exhaustive = h.is_materialized(n + 1) &&
                            static_cast<Count>(h.level(n + 1).size()) * (L + 1) * h.population(n) <= 50'000'000;
    rep.method = exhaustive ? "exhaustive" : "canonical-extremes";
    std::vector<TubeFamily> stage;
    if (exhaustive) stage = besicovitch_stage(v, n, C, 50'000'000);
    const Real tiny = std::numeric_limits<Real>::min();
    rep.samples.resize(thetas.size());
    for (std::size_t s = 0; s < thetas.size(); ++s) {
        const Real theta = thetas[s];
        ContainmentSample& cs = rep.samples[s];
        cs.theta = theta;
        const Point vt = v.limit(theta, tiny).v;
        Count contained = 0;
        if (exhaustive) {
            const auto pts = gamma_theta_anchors(h.level(n + 1), theta, vt);
            for (const Point z : pts) {
                Real best = std::numeric_limits<Real>::infinity();
                Real bx = 0, by = 0;
                for (const TubeFamily& f : stage)
                    for (const RotatedBox& b : f.tubes) {
                        const Point u = b.local(z);
                        const Real r = std::max(std::abs(px(u)) / tn, std::abs(py(u)) / Dn);
                        if (r < best) {
                            best = r;
                            bx = std::abs(px(u)) / tn;
                            by = std::abs(py(u)) / Dn;
                        }
                    }
                if (best > cs.required_C) {
                    cs.required_C = best;
                    cs.worst_x = bx;
                    cs.worst_y = by;
                }
                if (classify(C - best, 64 * kEps * (1 + best)) == Verdict::pass) ++contained;
            }
            cs.points = pts.size();
        } else {
            const LevelSet& parents = h.level(n);
            const ArcSolution& sol = h.arc(n);
            const std::uint64_t N = h.uniform_count(n);
            const Real step = t.theta_r(n + 1);
            Count i = static_cast<Count>(std::floor(std::ldexp(theta, static_cast<int>(e))));
            if (i > L) i = L;
            const Real Theta = std::ldexp(count_to_real(i), -static_cast<int>(e));
            const Real phi = theta - Theta;
            const Point u = std::conj(cis_neg(Theta)) * (vt - v({n, i}));
            const Point omp = one_minus_cis_neg(phi);
            const Point rphi = cis_neg(phi);
            for (const RectNode& p : parents.rects) {
                const Point W = sol.center - p.anchor;
                std::vector<std::uint64_t> ks{1, N};
                add_critical(ks, phi, step, N, std::atan2(py(W), px(W)));
                add_critical(ks, phi, step, N, std::atan2(-px(W), py(W)));
                Extremes ex;
                for (std::uint64_t k : ks) {
                    const Point loc = -omp * p.anchor + rphi * child_offset(p.anchor, sol, k) + u;
                    ex.x = std::max(ex.x, std::abs(px(loc)) / tn);
                    ex.y = std::max(ex.y, std::abs(py(loc)) / Dn);
                }
                const Real req = std::max(ex.x, ex.y);
                if (req > cs.required_C) {
                    cs.required_C = req;
                    cs.worst_x = ex.x;
                    cs.worst_y = ex.y;
                }
                if (classify(C - req, 64 * kEps * (1 + req) + 2 * v.tail_bound(h.depth()) / std::min(tn, Dn)) ==
                    Verdict::pass)
                    contained += N;
            }
            cs.points = 0;
            rep.points += static_cast<Count>(parents.size()) * N;
        }
        if (exhaustive) rep.points += cs.points;
        cs.contained = exhaustive ? static_cast<std::size_t>(contained) : 0;
        rep.contained += contained;
        rep.min_sufficient_C = std::max(rep.min_sufficient_C, cs.required_C);
        ++rep.thetas;
    }
    return rep;
}

std::vector<Real> random_thetas(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<Real> out(count);
    for (auto& x : out) x = std::ldexp(static_cast<Real>(rng() >> 11), -53);
    return out;
}

nlohmann::json to_json(const ContainmentReport& r)
{
    nlohmann::json s = nlohmann::json::array();
    for (const auto& c : r.samples)
        s.push_back({{"theta", decimal(c.theta)},
                     {"required_C", decimal(c.required_C, 12)},
                     {"x_over_theta_n", decimal(c.worst_x, 12)},
                     {"y_over_Delta_n", decimal(c.worst_y, 12)}});
    return {{"n", r.n},
            {"C", decimal(r.C, 6)},
            {"method", r.method},
            {"thetas", r.thetas},
            {"points", to_string(r.points)},
            {"contained", to_string(r.contained)},
            {"min_sufficient_C", decimal(r.min_sufficient_C, 12)},
            {"passed", r.passed()},
            {"samples", s}};
}

nlohmann::json to_json(const VBound& b)
{
    return {{"n", b.n}, {"samples", b.samples}, {"K_x", decimal(b.K_x, 12)}, {"K_y", decimal(b.K_y, 12)}};
}

nlohmann::json to_json(const LimitValue& l)
{
    nlohmann::json p = nlohmann::json::array();
    for (const Point& x : l.partials) p.push_back(point_json(x));
    return {{"v", point_json(l.v)},
            {"error_bound", decimal(l.error_bound, 6)},
            {"level", l.level},
            {"converged", l.converged},
            {"partials", p}};
}

std::string translation_csv(const SequenceTable& table, const TranslationTable& t)
{
    std::ostringstream os;
    os << "level,j,theta_num,theta_log2_den,v_x,v_y,case\n";
    for (const auto& e : t.entries) {
        const Rational th = angle_exact(table, {t.level, e.j});
        const auto dj = dyadic_to_json(th);
        os << t.level << ',' << to_string(e.j) << ',' << (dj["num"].is_string() ? dj["num"].get<std::string>() : dj["num"].dump())
           << ',' << dj["log2_den"].get<long>() << ',' << decimal(px(e.v)) << ',' << decimal(py(e.v)) << ','
           << to_string(e.tag) << '\n';
    }
    return os.str();
}

} // namespace besic
