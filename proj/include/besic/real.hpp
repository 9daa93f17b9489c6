#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace besic {

// All geometry runs in x87 extended precision (64-bit mantissa on x86-64).
using Real = long double;

// The plane is identified with C: (x, y) ~ x + iy.
using Point = std::complex<Real>;

inline constexpr Real kEps = std::numeric_limits<Real>::epsilon();
inline constexpr Real kPi = 3.141592653589793238462643383279502884L;

// e^{-it}
inline Point cis_neg(Real t) { return {std::cos(t), -std::sin(t)}; }

// 1 - e^{-it} without cancellation for small t.
inline Point one_minus_cis_neg(Real t)
{
    const Real s = std::sin(t / 2);
    return {2 * s * s, std::sin(t)};
}

inline Real px(Point p) { return p.real(); }
inline Real py(Point p) { return p.imag(); }

inline Real norm2(Point p) { return std::hypot(p.real(), p.imag()); }

// Classification of a floating-point inequality check against its
// accumulated rounding bound.
enum class Verdict { pass, inconclusive, fail };

// `margin` is bound - |deviation|. A check only counts as verified when
// the margin clears ten times the rounding error.
inline Verdict classify(Real margin, Real error)
{
    if (margin >= 10 * error) return Verdict::pass;
    if (margin + error < 0) return Verdict::fail;
    return Verdict::inconclusive;
}

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::fail: return "fail";
    }
    return "?";
}

} // namespace besic
