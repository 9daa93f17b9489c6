#pragma once

#include <cstdint>

#include <json.hpp>

#include "besic/real.hpp"

namespace besic {

struct SequenceTable;

// The circle C_n through (0,0) and (delta_n, Delta_n) whose first sub-arc,
// ending on the line y = Delta_{n+1}, subtends exactly theta_{n+1}.
struct ArcSolution {
    int level = 0;
    Point center;        // alpha_{n+1}, below the x-axis
    Real radius = 0;     // |alpha_{n+1}|
    Real sub_angle = 0;  // theta_{n+1}
    Point q;             // q_{n+1} = alpha (1 - e^{-i theta})
    Real residual = 0;   // |achieved angle - theta_{n+1}|
    Real offset = 0;     // signed position of the center along the bisector
    Real delta = 0;      // delta_n
    Real Delta = 0;      // Delta_n
    Real Delta_next = 0; // Delta_{n+1}
};

// Perpendicular bisector of the chord (0,0)-(delta, Delta), parameterized
// by signed distance t from the chord midpoint, pointing down and right.
struct Bisector {
    Point mid;
    Point dir;
    Real axis_offset = 0; // t at which the center crosses the x-axis

    Point center(Real t) const { return mid + t * dir; }
};

Bisector make_bisector(Real delta, Real Delta);

// Angle at `center` between the origin and the first intersection of the
// circle through the origin with the line y = height. Requires the center
// below the x-axis (or on it) and the intersection to exist.
Real subarc_angle(Point center, Real height);

struct ArcSolveOptions {
    Real angle_tol = 0x1p-60L; // relative to theta_next
    int monotonicity_samples = 64;
};

ArcSolution solve_arc(Real delta_n, Real Delta_n, Real Delta_next, Real theta_next,
                      const ArcSolveOptions& opts = {}, int level = 0);

// Arc C_n for level n of a table (n in 1..depth-1).
ArcSolution solve_arc(const SequenceTable& table, int n, const ArcSolveOptions& opts = {});

// alpha (1 - e^{-i (k-1) theta}); k = 1 is the origin, k = 2 is q.
Point arc_point(const ArcSolution& sol, std::uint64_t k);

nlohmann::json to_json(const ArcSolution& sol);

} // namespace besic
