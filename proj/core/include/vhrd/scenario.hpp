#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vhrd/grid.hpp"
#include "vhrd/ode.hpp"

namespace vhrd {

struct SolverOptions {
    double linear_tol = 1e-11;
    double eigen_tol = 1e-9;
    double equilibrium_tol = 1e-8;
    double dt = 0.0; // 0 picks a stability-capped step
    double horizon = 200.0;
    double settle_tol = 1e-8;
    double sample_dt = 0.25;
    std::vector<double> snapshot_times;
};

/// Sweep over one scalar knob. For "delta", "delta1", "delta2" each value
/// replaces the diffusion profile with a constant; any other coefficient
/// name treats the value as a multiplier on the base profile.
struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
    bool simulate = false;
};

struct OdeSpec {
    OdeParams params;
    OdeState initial;
};

/// Parsed scenario file. The spatial blocks (grid, coefficients, initial)
/// are present for the PDE commands; the ode block drives the companion
/// model. Either side may be absent; commands check for what they need.
struct Scenario {
    int schema = 1;
    std::optional<Grid> grid;
    // order: delta1, delta2, lambda, beta, sigma1, sigma2, mu, h_u
    std::array<Profile, 8> coefficients{};
    // order: h_i, v_u, v_i
    std::array<Profile, 3> initial{};
    bool has_pde = false;
    SolverOptions solver;
    std::optional<SweepSpec> sweep;
    std::optional<OdeSpec> ode;
};

extern const std::array<std::string, 8> kCoefficientNames;
extern const std::array<std::string, 3> kInitialNames;

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

ModelCoefficients build_coefficients(const Scenario& s);

/// Coefficients with one sweep value applied (see SweepSpec).
ModelCoefficients build_swept_coefficients(const Scenario& s, const std::string& parameter,
                                           double value);

/// Initial fields for the three evolved species; values must be nonnegative.
std::array<Field, 3> build_initial_fields(const Scenario& s);

} // namespace vhrd
