#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "besic/hierarchy.hpp"

namespace besic {

// theta = index * theta_level, an element of the dyadic angle grid D.
struct GridAngle {
    int level = 1;
    Count index = 0;
};

// theta_m = 2^-t_m with t_m the table's theta exponent.
GridAngle grid_angle(const SequenceTable& table, int level, Count index);
Real angle_value(const SequenceTable& table, const GridAngle& a);
Rational angle_exact(const SequenceTable& table, const GridAngle& a);
// Theta_m = floor(theta / theta_m) theta_m for a grid angle at level >= m.
GridAngle coarsen(const SequenceTable& table, const GridAngle& a, int m);

enum class VCase { base, case1, case2, case3 };
const char* to_string(VCase c);

struct TranslationValue {
    Point v;
    VCase tag = VCase::base;
};

struct TranslationEntry {
    Count j = 0;
    Point v;
    VCase tag = VCase::base;
};

struct TranslationTable {
    int level = 1;
    Real grid_step = 0;
    std::vector<TranslationEntry> entries; // j = 0..theta_n^{-1}
};

struct LimitValue {
    Point v;
    Real error_bound = 0; // |v - v_theta| <= error_bound
    int level = 0;        // finest grid used
    bool converged = false;
    std::vector<Point> partials; // v_{Theta_1}, ..., v_{Theta_level}
};

struct VBound {
    int n = 0;
    std::size_t samples = 0;
    Real K_x = 0; // max |P_x(v_theta)| / theta_n over sampled theta < theta_n
    Real K_y = 0; // max |P_y(v_theta)| / Delta_n
};

// v_theta on the dyadic grid by the three-case recursion, and its left
// limit off the grid.
class TranslationField {
public:
    explicit TranslationField(const Hierarchy& h);

    const Hierarchy& hierarchy() const { return h_; }

    TranslationValue value(const GridAngle& a) const;
    Point operator()(const GridAngle& a) const { return value(a).v; }

    // v at Theta_m = floor(theta/theta_m) theta_m for m = 1.. until the
    // certified tail bound drops below tol (or the depth is exhausted).
    LimitValue limit(Real theta, Real tol) const;
    // Same with the grid level fixed.
    LimitValue limit_at(Real theta, int m) const;
    // Tail bound sum_{j >= m} 2 Delta_j, the terms past the depth bounded
    // geometrically by Delta_{j+1} <= c Delta_j.
    Real tail_bound(int m) const;

    const TranslationTable& table(int n) const;

    VBound v_bound(int n, std::size_t samples, std::uint64_t seed) const;

private:
    const Hierarchy& h_;
    std::vector<long> t_; // t_[m] = -log2 theta_m
    mutable std::mutex mutex_;
    mutable std::map<int, TranslationTable> tables_;
};

// Literal transcription of the three cases (recursive, memo-free), used as
// an independent check against TranslationField::value.
Point translation_vector_recursive(const Hierarchy& h, const GridAngle& a);

// Level-n approximant of Gamma_theta: e^{-i theta} p + v for the anchors.
std::vector<Point> gamma_theta_anchors(const LevelSet& level, Real theta, Point v);

// e^{-i angle} (x, y)
inline Point rotate(Point z, Real angle) { return cis_neg(angle) * z; }

struct RotatedBox {
    Point center;
    Real angle = 0; // the box frame is the axis frame rotated by -angle
    Real half_w = 0;
    Real half_h = 0;

    // Coordinates of z in the box frame.
    Point local(Point z) const { return (z - center) * std::conj(cis_neg(angle)); }
    bool contains(Point z, Real margin = 0) const;
    std::array<Point, 4> corners() const;
    RotatedBox inflated(Real r) const { return {center, angle, half_w + r, half_h + r}; }
};

enum class TubeVariant { T, T_prime };
const char* to_string(TubeVariant v);

// T variant: e^{-il theta_n} T_n + v_{l theta_n}, boxes centered at p_{n,j}
// with half-extents (C theta_n, C Delta_n).
// T_prime variant: e^{-il theta_{n+1}} T'_{n+1} + v_{l theta_{n+1}}, boxes
// centered at p_{n,j,k} with half-extents (2C theta_{n+1}, 2C Delta_{n+1}).
struct TubeFamily {
    int level = 1;
    Count angle_index = 0;
    Real angle = 0;
    Point translation;
    TubeVariant variant = TubeVariant::T;
    Real C = 16;
    std::vector<RotatedBox> tubes;
};

TubeFamily tube_family(const TranslationField& v, int n, Count l, Real C, TubeVariant variant = TubeVariant::T);

// The n-th finite stage: T_{n, l theta_n} for l = 0..theta_n^{-1}.
std::vector<TubeFamily> besicovitch_stage(const TranslationField& v, int n, Real C,
                                          std::size_t cap = 2'000'000);

// Smallest C' with z inside the box scaled to half-extents (C' theta_n, C' Delta_n).
Real required_constant(Point z, const RotatedBox& box, Real theta_n, Real Delta_n);

struct ContainmentSample {
    Real theta = 0;
    std::size_t points = 0;
    std::size_t contained = 0;
    Real required_C = 0; // max over points of the min over boxes
    Real worst_x = 0;    // |P_x(z - p_{n,j})| / theta_n at the worst point (local frame)
    Real worst_y = 0;    // |P_y(z - p_{n,j})| / Delta_n
};

struct ContainmentReport {
    int n = 0;
    Real C = 16;
    std::string method; // "exhaustive" or "canonical-extremes"
    std::size_t thetas = 0;
    Count points = 0;
    Count contained = 0;
    Real min_sufficient_C = 0; // max over sampled theta
    std::vector<ContainmentSample> samples;

    bool passed() const { return thetas > 0 && contained == points && min_sufficient_C <= C; }
};

// Every anchor of the level-(n+1) approximant of Gamma_theta against the
// stage-n tubes. Stored level n+1: exhaustive over anchors and all boxes.
// Otherwise each level-n rectangle's children are checked against the box
// of the same rectangle in the family floor(theta/theta_n), using the
// closed-form extremes of the child anchors along the arc, which gives an
// upper bound for the sufficient constant.
ContainmentReport check_containment(const TranslationField& v, int n, const std::vector<Real>& thetas, Real C);

std::vector<Real> random_thetas(std::size_t count, std::uint64_t seed);

nlohmann::json to_json(const ContainmentReport& r);
nlohmann::json to_json(const VBound& b);
nlohmann::json to_json(const LimitValue& l);

// CSV columns: level,j,theta_num,theta_log2_den,v_x,v_y,case
std::string translation_csv(const SequenceTable& table, const TranslationTable& t);

} // namespace besic
