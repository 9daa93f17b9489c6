#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "besic/real.hpp"

namespace besic {

// Number of significant digits emitted for transcendental-derived values.
inline constexpr int kDecimalDigits = 21;

inline std::string decimal(Real v, int digits = kDecimalDigits)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*Le", digits - 1, v);
    return buf;
}

inline nlohmann::json point_json(Point p) { return nlohmann::json::array({decimal(p.real()), decimal(p.imag())}); }

} // namespace besic
