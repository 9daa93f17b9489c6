#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "besic/config.hpp"
#include "besic/error.hpp"

namespace besic {

struct RunResult {
    ExitCode code = ExitCode::ok;
    std::vector<std::string> failures;
    std::vector<std::string> files;
    bool demo = false;
};

inline constexpr const char* kDemoBanner =
    "DEMO PROFILE: Delta_{n+1} uses exponent 2 instead of n+1; structural checks only, "
    "theorem-constant measurements suppressed";

// Runs the construction, every verification and the renders for one
// configuration and writes them under out_dir with a manifest.
RunResult run_pipeline(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

} // namespace besic
