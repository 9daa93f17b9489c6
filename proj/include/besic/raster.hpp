#pragma once

#include <cstdint>
#include <vector>

#include "besic/hierarchy.hpp"
#include "besic/rotation.hpp"

namespace besic {

struct RasterOptions {
    Real resolution = 0; // cell side
    std::size_t max_cells = 200'000'000;
    int threads = 1;
};

struct AreaEstimate {
    Real value = 0; // cell-center classification
    Real lower = 0; // cells inside a single piece
    Real upper = 0; // cells touched by some piece
    Real resolution = 0;
    Real error_bound = 0;     // max(value - lower, upper - value)
    Real perimeter_bound = 0; // 2 x total perimeter x cell size
    Count cells_on = 0;
    Count cells_inside = 0;
    Count cells_touched = 0;
    std::size_t nx = 0;
    std::size_t ny = 0;
};

// Rasterized area of a union of rotated boxes.
AreaEstimate union_area(const std::vector<RotatedBox>& boxes, const RasterOptions& opts);

// Rasterized area of (union a) \ (union b).
AreaEstimate difference_area(const std::vector<RotatedBox>& a, const std::vector<RotatedBox>& b,
                             const RasterOptions& opts);

// Exact area of a convex polygon's intersection with an axis-aligned
// rectangle (Sutherland-Hodgman); reference values for the raster.
Real clipped_area(const std::vector<Point>& convex, Real x0, Real y0, Real x1, Real y1);
Real polygon_area(const std::vector<Point>& poly);

} // namespace besic
