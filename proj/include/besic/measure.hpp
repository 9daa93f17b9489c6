#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "besic/raster.hpp"

namespace besic {

struct ProjectionLengths {
    int level = 1;
    Real len_x = 0;
    Real len_y = 0;
};

// Interval-union lengths of the x- and y-projections of a stored level.
ProjectionLengths projection_lengths(const LevelSet& level);

// Union of the stage's tubes, each inflated by `radius` in its own frame.
// Requires resolution <= radius / 4 unless radius is zero.
AreaEstimate neighborhood_area(const std::vector<TubeFamily>& stage, Real radius, Real resolution,
                               std::size_t max_cells = 200'000'000, int threads = 1);

// |fam_a \ fam_b|
AreaEstimate pairwise_overlap_loss(const TubeFamily& a, const TubeFamily& b, Real resolution,
                                   std::size_t max_cells = 200'000'000, int threads = 1);

struct DimensionScale {
    int p = 0;
    long log2_inv_delta = 0; // delta_p = 2^-log2_inv_delta
    Count count = 0;         // prod_{q < p} N_q
    Rational s_p;
    Real covering_sum = 0;   // delta_p^{s_p} count_p
};

struct DimensionEstimate {
    std::vector<DimensionScale> scales;
    std::optional<Real> slope; // least squares of log count against log(1/delta), p >= 2
    Real target = 0;           // mean s_p over the fitted scales
    Real residual = 0;         // |slope - target|
    Real K0 = 0;               // max covering sum
    Rational s;
};

// delta_p^{exponent} count_p
Real covering_sum(const DimensionScale& sc, Real exponent);

DimensionEstimate box_dimension_x_projection(const Hierarchy& h, int max_level);

struct DimensionBound {
    int n = 0;
    Real measured_area = 0; // |B_stage(theta_{n+1})|
    Real bound = 0;         // Delta_{n+1} / Delta_n
    Real constant = 0;      // measured_area / bound
    Rational exponent;      // 1 + 2/(n+1)
};

Rational dimension_exponent(int n);
DimensionBound dimension_bound_B(const SequenceTable& table, int n, const AreaEstimate& area);

nlohmann::json to_json(const AreaEstimate& e);
nlohmann::json to_json(const ProjectionLengths& p);
nlohmann::json to_json(const DimensionEstimate& d);
nlohmann::json to_json(const DimensionBound& b);

// CSV columns: scale,log2_inv_delta,count,s_p,sum,slope
std::string dimension_csv(const DimensionEstimate& d);

} // namespace besic
