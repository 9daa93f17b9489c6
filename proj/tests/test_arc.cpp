#include <doctest.h>

#include "besic/arc.hpp"
#include "besic/error.hpp"
#include "fixtures.hpp"

using namespace besic;

namespace {

// Angle at the center between the origin and the left intersection of the
// circle with y = h.
Real scan_angle(Point c, Real h)
{
    const Real R = std::abs(c);
    const Real dy = h - c.imag();
    const Real x = c.real() - std::sqrt(R * R - dy * dy);
    const Point u = -c;
    const Point v = Point(x, h) - c;
    const Real cross = u.real() * v.imag() - u.imag() * v.real();
    const Real dot = u.real() * v.real() + u.imag() * v.imag();
    return std::atan2(std::abs(cross), dot);
}

// Sweep 1e6 log-spaced centers along the chord bisector and return the
// center at which the sub-arc angle crosses theta.
Point scan_center(Real delta, Real Delta, Real Dnext, Real theta)
{
    const Point mid(delta / 2, Delta / 2);
    const Point dir = Point(Delta, -delta) / std::hypot(delta, Delta);
    const Real t0 = -mid.imag() / dir.imag();
    const int samples = 1'000'000;
    Point prev_c;
    Real prev_f = 0;
    for (int i = 0; i <= samples; ++i) {
        const Real u = -4 + 20 * static_cast<Real>(i) / samples;
        const Point c = mid + (t0 + std::pow(Real(10), u)) * dir;
        const Real f = scan_angle(c, Dnext) - theta;
        if (i > 0 && (f <= 0) != (prev_f <= 0)) return f == prev_f ? c : prev_c + (c - prev_c) * (prev_f / (prev_f - f));
        prev_c = c;
        prev_f = f;
    }
    return {};
}

} // namespace

TEST_SUITE("arc") {

TEST_CASE("solved arcs match a brute-force bisector scan")
{
    const SequenceTable t = fixtures::strict_table();
    for (int n = 1; n < t.depth(); ++n) {
        CAPTURE(n);
        const ArcSolution sol = solve_arc(t, n);
        const Point scanned = scan_center(t.delta_r(n), t.Delta_r(n), t.Delta_r(n + 1), t.theta_r(n + 1));
        REQUIRE(std::abs(scanned) > 0);
        CHECK(std::abs(sol.center - scanned) <= 1e-4L * std::abs(sol.center));
    }
}

TEST_CASE("circle geometry")
{
    const SequenceTable t = fixtures::strict_table();
    for (int n = 1; n < t.depth(); ++n) {
        CAPTURE(n);
        const ArcSolution sol = solve_arc(t, n);
        const Real R = sol.radius;
        CHECK(std::abs(std::abs(sol.center) - R) <= 1e-15L * R);
        CHECK(std::abs(std::abs(sol.center - Point(t.delta_r(n), t.Delta_r(n))) - R) <= 1e-15L * R);
        CHECK(sol.center.imag() <= 0);
        CHECK(sol.center.real() > 0);
        CHECK(sol.residual <= 0x1p-60L * t.theta_r(n + 1));
        CHECK(std::abs(sol.q.imag() - t.Delta_r(n + 1)) <= 1e-12L * t.Delta_r(n + 1));
        CHECK(std::abs(arc_point(sol, 2) - sol.q) <= 1e-15L * std::abs(sol.q));
        CHECK(arc_point(sol, 1) == Point(0, 0));
        for (std::uint64_t k : {3u, 10u, 17u}) {
            const Point oracle = fixtures::rotate_about(Point(0, 0), sol, k);
            CHECK(std::abs(arc_point(sol, k) - oracle) <= 1e-14L);
        }
    }
}

TEST_CASE("level-1 radius")
{
    const ArcSolution sol = solve_arc(fixtures::strict_table(), 1);
    CHECK(sol.radius == doctest::Approx(21.97).epsilon(1e-3));
}

TEST_CASE("subarc angle of a known circle")
{
    // Center (1,-1): the origin sits at polar angle 3pi/4, and turning it
    // clockwise by a reaches height -1 + sqrt(2) sin(3pi/4 - a).
    const Real a = 0.25L;
    const Real h = -1 + std::sqrt(Real(2)) * std::sin(3 * kPi / 4 - a);
    CHECK(std::abs(subarc_angle(Point(1, -1), h) - a) <= 1e-15L);
}

TEST_CASE("unreachable height is a solver error")
{
    CHECK_THROWS_AS(solve_arc(1.0L, 1.0L, 2.0L, 0.01L), SolverError);
}

}
