#include "besic/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "besic/error.hpp"
#include "besic/format.hpp"

namespace besic {

namespace {

Real union_length(std::vector<std::pair<Real, Real>> iv)
{
    std::sort(iv.begin(), iv.end());
    Real total = 0;
    Real lo = 0, hi = 0;
    bool open = false;
    for (const auto& [a, b] : iv) {
        if (!open) {
            lo = a;
            hi = b;
            open = true;
        } else if (a <= hi) {
            hi = std::max(hi, b);
        } else {
            total += hi - lo;
            lo = a;
            hi = b;
        }
    }
    if (open) total += hi - lo;
    return total;
}

Real log2_count(Count c) { return std::log2(static_cast<Real>(c)); }

} // namespace

ProjectionLengths projection_lengths(const LevelSet& level)
{
    std::vector<std::pair<Real, Real>> xs, ys;
    xs.reserve(level.rects.size());
    ys.reserve(level.rects.size());
    for (const RectNode& r : level.rects) {
        xs.emplace_back(r.left(), r.right());
        ys.emplace_back(r.bottom(), r.top());
    }
    return {level.level, union_length(std::move(xs)), union_length(std::move(ys))};
}

AreaEstimate neighborhood_area(const std::vector<TubeFamily>& stage, Real radius, Real resolution,
                               std::size_t max_cells, int threads)
{
    if (radius < 0) throw ConfigError("neighborhood radius must be non-negative");
    if (radius > 0 && resolution > radius / 4) throw ConfigError("resolution must be at most radius / 4");
    std::vector<RotatedBox> boxes;
    for (const TubeFamily& f : stage)
        for (const RotatedBox& b : f.tubes) boxes.push_back(b.inflated(radius));
    return union_area(boxes, {resolution, max_cells, threads});
}

AreaEstimate pairwise_overlap_loss(const TubeFamily& a, const TubeFamily& b, Real resolution, std::size_t max_cells,
                                   int threads)
{
    if (a.level != b.level || a.variant != b.variant) throw ConfigError("overlap loss needs families of one level");
    return difference_area(a.tubes, b.tubes, {resolution, max_cells, threads});
}

Real covering_sum(const DimensionScale& sc, Real exponent)
{
    return std::exp2(log2_count(sc.count) - exponent * static_cast<Real>(sc.log2_inv_delta));
}

DimensionEstimate box_dimension_x_projection(const Hierarchy& h, int max_level)
{
    const SequenceTable& t = h.table();
    if (max_level < 2 || max_level > h.depth()) throw ConfigError("dimension fit needs 2 <= p <= depth");
    DimensionEstimate d;
    d.s = t.schedule.s;
    for (int p = 1; p <= max_level; ++p) {
        DimensionScale sc;
        sc.p = p;
        const auto e = exact_log2(t.delta(p));
        if (!e) throw ConfigError("delta_p must be a power of two");
        sc.log2_inv_delta = -*e;
        sc.count = h.population(p);
        sc.s_p = t.schedule.at(p);
        sc.covering_sum = covering_sum(sc, to_real(sc.s_p));
        if (!d.scales.empty() && !(sc.count > d.scales.back().count && sc.log2_inv_delta > d.scales.back().log2_inv_delta))
            throw ConstructionError("box counts must increase as delta decreases");
        d.scales.push_back(sc);
    }
    std::vector<Real> xs, ys;
    Real target = 0;
    for (const auto& sc : d.scales) {
        if (sc.p < 2) continue;
        xs.push_back(static_cast<Real>(sc.log2_inv_delta));
        ys.push_back(log2_count(sc.count));
        target += to_real(sc.s_p);
        d.K0 = std::max(d.K0, sc.covering_sum);
    }
    const auto m = static_cast<Real>(xs.size());
    d.target = target / m;
    if (xs.size() >= 2) {
        Real mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= m;
        my /= m;
        Real sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        d.slope = sxy / sxx;
        d.residual = std::abs(*d.slope - d.target);
    }
    return d;
}

Rational dimension_exponent(int n) { return 1 + Rational(2, n + 1); }

DimensionBound dimension_bound_B(const SequenceTable& table, int n, const AreaEstimate& area)
{
    if (n < 1 || n >= table.depth()) throw ConfigError("dimension bound level out of range");
    DimensionBound b;
    b.n = n;
    b.measured_area = area.value;
    b.bound = to_real(table.Delta(n + 1) / table.Delta(n));
    b.constant = b.measured_area / b.bound;
    b.exponent = dimension_exponent(n);
    return b;
}

nlohmann::json to_json(const AreaEstimate& e)
{
    return {{"value", decimal(e.value, 12)},
            {"lower", decimal(e.lower, 12)},
            {"upper", decimal(e.upper, 12)},
            {"resolution", decimal(e.resolution, 12)},
            {"error_bound", decimal(e.error_bound, 6)},
            {"perimeter_bound", decimal(e.perimeter_bound, 6)},
            {"cells_on", to_string(e.cells_on)},
            {"cells_inside", to_string(e.cells_inside)},
            {"cells_touched", to_string(e.cells_touched)},
            {"grid", {e.nx, e.ny}}};
}

nlohmann::json to_json(const ProjectionLengths& p)
{
    return {{"level", p.level}, {"len_x", decimal(p.len_x)}, {"len_y", decimal(p.len_y)}};
}

nlohmann::json to_json(const DimensionEstimate& d)
{
    nlohmann::json sc = nlohmann::json::array();
    for (const auto& s : d.scales)
        sc.push_back({{"p", s.p},
                      {"delta", {{"num", 1}, {"log2_den", s.log2_inv_delta}}},
                      {"count", to_string(s.count)},
                      {"s_p", to_string(s.s_p)},
                      {"covering_sum", decimal(s.covering_sum, 12)}});
    nlohmann::json j = {{"s", to_string(d.s)}, {"scales", sc}, {"target", decimal(d.target, 12)},
                        {"K0", decimal(d.K0, 12)}};
    if (d.slope) {
        j["slope"] = decimal(*d.slope, 12);
        j["residual"] = decimal(d.residual, 12);
    } else {
        j["slope"] = nullptr;
    }
    return j;
}

nlohmann::json to_json(const DimensionBound& b)
{
    return {{"n", b.n},
            {"measured_area", decimal(b.measured_area, 12)},
            {"bound_Delta_ratio", decimal(b.bound, 12)},
            {"constant", decimal(b.constant, 12)},
            {"exponent", to_string(b.exponent)},
            {"exponent_value", decimal(to_real(b.exponent), 12)}};
}

std::string dimension_csv(const DimensionEstimate& d)
{
    std::ostringstream os;
    os << "scale,log2_inv_delta,count,s_p,sum,slope\n";
    for (const auto& s : d.scales)
        os << s.p << ',' << s.log2_inv_delta << ',' << to_string(s.count) << ',' << to_string(s.s_p) << ','
           << decimal(s.covering_sum, 12) << ',' << (d.slope ? decimal(*d.slope, 12) : std::string()) << '\n';
    return os.str();
}

} // namespace besic
