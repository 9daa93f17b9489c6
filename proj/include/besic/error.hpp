#pragma once

#include <stdexcept>
#include <string>

namespace besic {

// Process exit codes used by the CLI.
enum class ExitCode : int { ok = 0, verification_failed = 1, config_error = 2, resource_cap = 3 };

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, ExitCode code = ExitCode::config_error)
        : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Bad input values or configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what, ExitCode::config_error) {}
};

// A requested size exceeds a configured cap (materialization, raster, render).
class ResourceCapError : public Error {
public:
    explicit ResourceCapError(const std::string& what) : Error(what, ExitCode::resource_cap) {}
};

// The sequence recursion cannot reach the requested depth inside the
// representable exponent range.
class DepthUnreachable : public Error {
public:
    DepthUnreachable(const std::string& what, int max_depth)
        : Error(what, ExitCode::resource_cap), max_depth_(max_depth) {}
    int max_depth() const noexcept { return max_depth_; }

private:
    int max_depth_;
};

// Arc solver failures: infeasible target angle or a degenerate bracket.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(what, ExitCode::config_error) {}
};

// Geometric construction invariants broken (e.g. child ordering).
class ConstructionError : public Error {
public:
    explicit ConstructionError(const std::string& what) : Error(what, ExitCode::verification_failed) {}
};

} // namespace besic
