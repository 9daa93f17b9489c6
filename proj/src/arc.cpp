#include "besic/arc.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

#include "besic/error.hpp"
#include "besic/format.hpp"
#include "besic/sequence.hpp"

namespace besic {

Bisector make_bisector(Real delta, Real Delta)
{
    Bisector b;
    const Real len = std::hypot(delta, Delta);
    b.mid = {delta / 2, Delta / 2};
    b.dir = {Delta / len, -delta / len};
    b.axis_offset = Delta * len / (2 * delta);
    return b;
}

Real subarc_angle(Point center, Real height)
{
    const Real ax = center.real();
    const Real ay = center.imag();
    // Left intersection of the circle with y = height, written so that the
    // cancellation a_x - sqrt(...) never happens explicitly.
    const Real lift = height * (height - 2 * ay);
    const Real root2 = ax * ax - lift;
    if (!(root2 >= 0) || ax <= 0) return std::numeric_limits<Real>::quiet_NaN();
    const Real qx = lift / (ax + std::sqrt(root2));
    // Angle between (-alpha) and (q - alpha).
    const Real cross = ax * height - ay * qx;
    const Real dot = ax * ax + ay * ay - (ax * qx + ay * height);
    return std::atan2(cross, dot);
}

namespace {

std::string describe(Real delta, Real Delta, Real Delta_next, Real theta)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "delta=%.6Le Delta=%.6Le Delta_next=%.6Le theta_next=%.6Le", delta, Delta,
                  Delta_next, theta);
    return buf;
}

} // namespace

ArcSolution solve_arc(Real delta, Real Delta, Real Delta_next, Real theta, const ArcSolveOptions& opts, int level)
{
    if (!(delta > 0 && delta <= Delta && Delta <= 1))
        throw SolverError("arc precondition 0 < delta <= Delta <= 1 violated: " +
                          describe(delta, Delta, Delta_next, theta));
    if (!(Delta_next > 0 && Delta_next < Delta))
        throw SolverError("arc precondition 0 < Delta_next < Delta violated: " +
                          describe(delta, Delta, Delta_next, theta));
    const Real feasible = Delta_next / (Delta * Delta) * delta;
    if (!(theta > 0 && theta <= feasible))
        throw SolverError("infeasible sub-arc angle (needs 0 < theta <= Delta_next Delta^-2 delta): " +
                          describe(delta, Delta, Delta_next, theta));

    const Bisector bis = make_bisector(delta, Delta);
    auto angle = [&](Real t) { return subarc_angle(bis.center(t), Delta_next); };

    Real lo = bis.axis_offset;
    const Real at_axis = angle(lo);
    if (!(at_axis >= theta))
        throw SolverError("bisection does not bracket at the x-axis crossing (angle " + std::to_string(double(at_axis)) +
                          "): " + describe(delta, Delta, Delta_next, theta));
    Real hi = 2 * lo;
    int doublings = 0;
    while (angle(hi) >= theta) {
        lo = hi;
        hi *= 2;
        if (++doublings > 16000)
            throw SolverError("far bracket not found: " + describe(delta, Delta, Delta_next, theta));
    }

    // The solver relies on the angle shrinking as the center moves away.
    {
        const Real a = bis.axis_offset;
        Real prev = angle(a);
        for (int i = 1; i <= opts.monotonicity_samples; ++i) {
            const Real t = a * std::pow(hi / a, Real(i) / opts.monotonicity_samples);
            const Real cur = angle(t);
            if (!(cur < prev))
                throw SolverError("sub-arc angle not monotone on the bracket at t=" + std::to_string(double(t)) +
                                  ": " + describe(delta, Delta, Delta_next, theta));
            prev = cur;
        }
    }

    for (int it = 0; it < 20000; ++it) {
        const Real mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        if (angle(mid) >= theta)
            lo = mid;
        else
            hi = mid;
    }
    const Real rlo = std::abs(angle(lo) - theta);
    const Real rhi = std::abs(angle(hi) - theta);
    const Real t = rlo <= rhi ? lo : hi;

    ArcSolution sol;
    sol.level = level;
    sol.offset = t;
    sol.center = bis.center(t);
    sol.radius = norm2(sol.center);
    sol.sub_angle = theta;
    sol.q = sol.center * one_minus_cis_neg(theta);
    sol.residual = std::min(rlo, rhi);
    sol.delta = delta;
    sol.Delta = Delta;
    sol.Delta_next = Delta_next;
    if (!(sol.residual <= opts.angle_tol * theta))
        throw SolverError("arc residual " + std::to_string(double(sol.residual / theta)) +
                          " (relative) above tolerance: " + describe(delta, Delta, Delta_next, theta));
    return sol;
}

ArcSolution solve_arc(const SequenceTable& table, int n, const ArcSolveOptions& opts)
{
    if (n < 1 || n >= table.depth())
        throw ConfigError("arc level " + std::to_string(n) + " needs 1 <= n < depth");
    return solve_arc(table.delta_r(n), table.Delta_r(n), table.Delta_r(n + 1), table.theta_r(n + 1), opts, n);
}

Point arc_point(const ArcSolution& sol, std::uint64_t k)
{
    if (k < 1) throw ConfigError("arc_point index must be >= 1");
    const Real angle = static_cast<Real>(k - 1) * sol.sub_angle;
    if (angle > 2 * kPi) throw ConfigError("arc_point index " + std::to_string(k) + " exceeds a full turn");
    return sol.center * one_minus_cis_neg(angle);
}

nlohmann::json to_json(const ArcSolution& s)
{
    return {{"level", s.level},
            {"precision_digits", kDecimalDigits},
            {"center", point_json(s.center)},
            {"radius", decimal(s.radius)},
            {"sub_angle", decimal(s.sub_angle)},
            {"q", point_json(s.q)},
            {"residual", decimal(s.residual)},
            {"bisector_offset", decimal(s.offset)}};
}

} // namespace besic
