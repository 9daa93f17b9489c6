#pragma once

#include <random>

#include "besic/hierarchy.hpp"
#include "besic/sequence.hpp"

namespace fixtures {

inline besic::SequenceTable strict_table(const besic::Rational& s = 1, int depth = 3)
{
    return besic::derive_sequences(besic::build_schedule(s, depth), besic::pow2(-4), besic::Profile::strict);
}

// Default strict hierarchy, built once per process.
inline const besic::Hierarchy& strict()
{
    static const besic::Hierarchy h(strict_table());
    return h;
}

// p -> alpha + e^{-i(k-1)theta} (p - alpha), written with std::polar.
inline besic::Point rotate_about(besic::Point p, const besic::ArcSolution& sol, std::uint64_t k)
{
    const besic::Point w = std::polar(besic::Real(1), -static_cast<besic::Real>(k - 1) * sol.sub_angle);
    return sol.center + w * (p - sol.center);
}

} // namespace fixtures
