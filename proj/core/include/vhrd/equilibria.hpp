#pragma once

#include <optional>

#include "vhrd/grid.hpp"
#include "vhrd/linalg.hpp"

namespace vhrd {

/// Carrying-capacity vector density: the unique positive steady state of
/// the logistic vector equation div(d2 grad V) + beta V - mu V^2 = 0 under
/// zero-flux boundaries. Damped Newton started from beta/mu; stops when the
/// sup-norm residual drops below tol.
Field compute_vhat(const ModelCoefficients& c, double tol = 1e-10,
                   double linear_tol = kDefaultLinearTol);

/// One application of the monotone fixed-point map for the infected-vector
/// profile of the endemic equilibrium. c2 is the stabilizing shift; for c2
/// large enough the map is order-preserving on [0, 2 vhat].
Field endemic_fixed_point_map(const Field& v_i, const ModelCoefficients& c, const Field& vhat,
                              double c2, double linear_tol = kDefaultLinearTol);

struct EndemicPair {
    Field h_i;
    Field v_i;
};

/// Endemic equilibrium via monotone iteration: a sub-solution seeded from
/// the principal eigenvector climbs, a super-solution at 2 vhat descends,
/// and both must meet. Returns nothing when R0 <= 1. r0_hint skips the
/// internal R0 computation when the caller already has it.
std::optional<EndemicPair> compute_endemic(const ModelCoefficients& c, const Field& vhat,
                                           double tol = 1e-8,
                                           std::optional<double> r0_hint = std::nullopt);

struct Equilibrium {
    Field h_i;
    Field v_u;
    Field v_i;
};

struct EquilibriumSet {
    Equilibrium extinction;      ///< all zero
    Equilibrium infection_free;  ///< (0, vhat, 0)
    std::optional<Equilibrium> endemic; ///< present exactly when r0 > 1
    Field vhat;
    double r0 = 0.0;
};

EquilibriumSet enumerate_equilibria(const ModelCoefficients& c, double tol = 1e-8);

} // namespace vhrd
