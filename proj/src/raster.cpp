#include "besic/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "besic/error.hpp"
#include "besic/parallel.hpp"

namespace besic {

namespace {

struct Interval {
    Real lo = std::numeric_limits<Real>::infinity();
    Real hi = -std::numeric_limits<Real>::infinity();
    bool empty() const { return lo > hi; }
    void add(Real x)
    {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
};

using Quad = std::array<Point, 4>;

// x-extent of the convex quad on the horizontal line at height y.
Interval slice(const Quad& q, Real y)
{
    Interval iv;
    for (int e = 0; e < 4; ++e) {
        const Point a = q[e];
        const Point b = q[(e + 1) % 4];
        const Real ya = py(a), yb = py(b);
        if ((ya <= y && y <= yb) || (yb <= y && y <= ya)) {
            if (ya == yb) {
                iv.add(px(a));
                iv.add(px(b));
            } else {
                const Real t = (y - ya) / (yb - ya);
                iv.add(px(a) + t * (px(b) - px(a)));
            }
        }
    }
    return iv;
}

// x-extent of the quad clipped to the strip y0 <= y <= y1.
Interval band(const Quad& q, Real y0, Real y1)
{
    Interval iv = slice(q, y0);
    const Interval top = slice(q, y1);
    if (!top.empty()) {
        iv.add(top.lo);
        iv.add(top.hi);
    }
    for (const Point& v : q)
        if (py(v) > y0 && py(v) < y1) iv.add(px(v));
    return iv;
}

struct Grid {
    Real x0 = 0, y0 = 0, h = 0;
    std::size_t nx = 0, ny = 0;
    std::vector<std::uint8_t> bits;
};

Grid make_grid(const std::vector<Quad>& quads, const RasterOptions& opts)
{
    if (!(opts.resolution > 0)) throw ConfigError("raster resolution must be positive");
    Real minx = std::numeric_limits<Real>::infinity(), miny = minx;
    Real maxx = -minx, maxy = -minx;
    for (const Quad& q : quads)
        for (const Point& v : q) {
            minx = std::min(minx, px(v));
            maxx = std::max(maxx, px(v));
            miny = std::min(miny, py(v));
            maxy = std::max(maxy, py(v));
        }
    Grid g;
    g.h = opts.resolution;
    if (quads.empty()) return g;
    g.x0 = (std::floor(minx / g.h) - 1) * g.h;
    g.y0 = (std::floor(miny / g.h) - 1) * g.h;
    const Real fx = std::ceil((maxx - g.x0) / g.h) + 1;
    const Real fy = std::ceil((maxy - g.y0) / g.h) + 1;
    if (fx * fy > static_cast<Real>(opts.max_cells))
        throw ResourceCapError("raster of " + std::to_string(static_cast<long double>(fx * fy)) +
                               " cells exceeds the cap; use a coarser resolution or tile the domain");
    g.nx = static_cast<std::size_t>(fx);
    g.ny = static_cast<std::size_t>(fy);
    g.bits.assign(g.nx * g.ny, 0);
    return g;
}

// Cells i with lo <= f(i) <= hi for a monotone affine f, clipped to [0, nx).
void fill(std::uint8_t* row, std::size_t nx, long long a, long long b, std::uint8_t mask)
{
    a = std::max<long long>(a, 0);
    b = std::min<long long>(b, static_cast<long long>(nx) - 1);
    for (long long i = a; i <= b; ++i) row[i] |= mask;
}

long long lfloor(Real x) { return static_cast<long long>(std::floor(x)); }
long long lceil(Real x) { return static_cast<long long>(std::ceil(x)); }

// bit 0: cell center covered; bit 1: cell inside one quad; bit 2: cell touched.
void rasterize(Grid& g, const std::vector<Quad>& quads, int shift, int threads)
{
    std::vector<std::pair<Real, Real>> yr(quads.size());
    for (std::size_t i = 0; i < quads.size(); ++i) {
        Real lo = py(quads[i][0]), hi = lo;
        for (const Point& v : quads[i]) {
            lo = std::min(lo, py(v));
            hi = std::max(hi, py(v));
        }
        yr[i] = {lo, hi};
    }
    const std::uint8_t mc = static_cast<std::uint8_t>(1u << shift);
    const std::uint8_t mi = static_cast<std::uint8_t>(2u << shift);
    const std::uint8_t mt = static_cast<std::uint8_t>(4u << shift);
    parallel_for(g.ny, threads, [&](std::size_t rb, std::size_t re, int) {
        for (std::size_t qi = 0; qi < quads.size(); ++qi) {
            const Quad& q = quads[qi];
            const long long r0 = std::max<long long>(static_cast<long long>(rb), lfloor((yr[qi].first - g.y0) / g.h) - 1);
            const long long r1 = std::min<long long>(static_cast<long long>(re) - 1, lceil((yr[qi].second - g.y0) / g.h) + 1);
            for (long long r = r0; r <= r1; ++r) {
                std::uint8_t* row = g.bits.data() + static_cast<std::size_t>(r) * g.nx;
                const Real y0 = g.y0 + static_cast<Real>(r) * g.h;
                const Real y1 = y0 + g.h;
                const Interval hull = band(q, y0, y1);
                if (hull.empty()) continue;
                fill(row, g.nx, lceil((hull.lo - g.x0) / g.h) - 1, lfloor((hull.hi - g.x0) / g.h), mt);
                const Interval mid = slice(q, y0 + g.h / 2);
                if (!mid.empty())
                    fill(row, g.nx, lceil((mid.lo - g.x0) / g.h - Real(0.5)), lfloor((mid.hi - g.x0) / g.h - Real(0.5)),
                         mc);
                const Interval a = slice(q, y0);
                const Interval b = slice(q, y1);
                if (!a.empty() && !b.empty()) {
                    const Real lo = std::max(a.lo, b.lo);
                    const Real hi = std::min(a.hi, b.hi);
                    if (lo <= hi) fill(row, g.nx, lceil((lo - g.x0) / g.h), lfloor((hi - g.x0) / g.h) - 1, mi);
                }
            }
        }
    });
}

std::vector<Quad> quads_of(const std::vector<RotatedBox>& boxes)
{
    std::vector<Quad> q;
    q.reserve(boxes.size());
    for (const RotatedBox& b : boxes) q.push_back(b.corners());
    return q;
}

Real perimeter(const std::vector<RotatedBox>& boxes)
{
    Real p = 0;
    for (const RotatedBox& b : boxes) p += 4 * (b.half_w + b.half_h);
    return p;
}

AreaEstimate finish(const Grid& g, Count on, Count inside, Count touched, Real perim)
{
    AreaEstimate e;
    const Real a = g.h * g.h;
    e.resolution = g.h;
    e.cells_on = on;
    e.cells_inside = inside;
    e.cells_touched = touched;
    e.value = static_cast<Real>(on) * a;
    e.lower = static_cast<Real>(inside) * a;
    e.upper = static_cast<Real>(touched) * a;
    e.error_bound = std::max(e.value - e.lower, e.upper - e.value);
    e.perimeter_bound = 2 * perim * g.h;
    e.nx = g.nx;
    e.ny = g.ny;
    return e;
}

} // namespace

AreaEstimate union_area(const std::vector<RotatedBox>& boxes, const RasterOptions& opts)
{
    const auto quads = quads_of(boxes);
    Grid g = make_grid(quads, opts);
    rasterize(g, quads, 0, opts.threads);
    Count on = 0, in = 0, tc = 0;
    for (std::uint8_t b : g.bits) {
        on += b & 1;
        in += (b >> 1) & 1;
        tc += (b >> 2) & 1;
    }
    return finish(g, on, in, tc, perimeter(boxes));
}

AreaEstimate difference_area(const std::vector<RotatedBox>& a, const std::vector<RotatedBox>& b,
                             const RasterOptions& opts)
{
    const auto qa = quads_of(a);
    const auto qb = quads_of(b);
    std::vector<Quad> all = qa;
    all.insert(all.end(), qb.begin(), qb.end());
    Grid g = make_grid(all, opts);
    rasterize(g, qa, 0, opts.threads);
    rasterize(g, qb, 3, opts.threads);
    Count on = 0, in = 0, tc = 0;
    for (std::uint8_t x : g.bits) {
        const bool ac = x & 1, ai = x & 2, at = x & 4;
        const bool bc = x & 8, bi = x & 16, bt = x & 32;
        on += ac && !bc;
        in += ai && !bt;
        tc += at && !bi;
    }
    return finish(g, on, in, tc, perimeter(a) + perimeter(b));
}

Real polygon_area(const std::vector<Point>& p)
{
    Real s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point a = p[i], b = p[(i + 1) % p.size()];
        s += px(a) * py(b) - px(b) * py(a);
    }
    return std::abs(s) / 2;
}

Real clipped_area(const std::vector<Point>& convex, Real x0, Real y0, Real x1, Real y1)
{
    std::vector<Point> poly = convex;
    auto clip = [&](auto inside, auto cross) {
        std::vector<Point> out;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point a = poly[i], b = poly[(i + 1) % poly.size()];
            const bool ia = inside(a), ib = inside(b);
            if (ia) out.push_back(a);
            if (ia != ib) out.push_back(cross(a, b));
        }
        poly = std::move(out);
    };
    auto at_x = [](Point a, Point b, Real x) {
        const Real t = (x - px(a)) / (px(b) - px(a));
        return Point{x, py(a) + t * (py(b) - py(a))};
    };
    auto at_y = [](Point a, Point b, Real y) {
        const Real t = (y - py(a)) / (py(b) - py(a));
        return Point{px(a) + t * (px(b) - px(a)), y};
    };
    clip([&](Point p) { return px(p) >= x0; }, [&](Point a, Point b) { return at_x(a, b, x0); });
    if (poly.empty()) return 0;
    clip([&](Point p) { return px(p) <= x1; }, [&](Point a, Point b) { return at_x(a, b, x1); });
    if (poly.empty()) return 0;
    clip([&](Point p) { return py(p) >= y0; }, [&](Point a, Point b) { return at_y(a, b, y0); });
    if (poly.empty()) return 0;
    clip([&](Point p) { return py(p) <= y1; }, [&](Point a, Point b) { return at_y(a, b, y1); });
    return poly.size() < 3 ? 0 : polygon_area(poly);
}

} // namespace besic
