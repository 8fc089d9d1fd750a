#pragma once

#include <stdexcept>
#include <string>

namespace vhrd {

/// Invalid user-facing input: bad scenario files, nonpositive coefficients,
/// mismatched grids. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: iteration caps hit, lost positivity, rejected steps.
/// Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by time steppers when a step would produce a negative state.
class StepRejected : public SolverError {
public:
    StepRejected(const std::string& what, double suggested)
        : SolverError(what), suggested_dt(suggested) {}
    double suggested_dt;
};

} // namespace vhrd
