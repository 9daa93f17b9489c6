#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "besic/hierarchy.hpp"

namespace besic {

struct RunConfig {
    Rational s = 1;
    Rational c = Rational(1, 16);
    int depth = 3;
    Profile profile = Profile::strict;
    Real C_tube = 16;
    Real angle_tol = 0x1p-60L;
    Real raster_resolution = 4; // cell side = theta_{n+1} / raster_resolution
    std::size_t materialization_cap = 2'000'000;
    std::size_t max_raster_cells = 200'000'000;
    std::size_t render_cap = 20'000;
    std::uint64_t seed = 1;
    std::size_t spacing_samples = 10'000;
    std::size_t identity_samples = 10'000;
    std::size_t containment_thetas = 100;
    std::size_t limit_thetas = 100;
    int threads = 1;
    std::string cache_dir;
};

// Throws ConfigError for out-of-range values.
void validate(const RunConfig& cfg);

// Unknown keys are rejected. Rationals accept "p/q", "2^-k", decimals and integers.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& file);

SequenceTable make_table(const RunConfig& cfg);
HierarchyOptions hierarchy_options(const RunConfig& cfg);

} // namespace besic
