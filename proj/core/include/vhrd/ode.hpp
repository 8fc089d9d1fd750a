#pragma once

#include <optional>
#include <vector>

namespace vhrd {

/// Parameters of the well-mixed companion model. All rates are strictly
/// positive; h_u is the (constant) density of uninfected hosts.
struct OdeParams {
    double lambda = 1.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double beta = 1.0;
    double mu = 1.0;
    double h_u = 1.0;
};

struct OdeState {
    double h_i = 0.0;
    double v_u = 0.0;
    double v_i = 0.0;
    double t = 0.0;

    double n() const { return v_u + v_i; }
};

struct OdeEquilibria {
    OdeState extinction;    // (0, 0, 0)
    OdeState infection_free; // (0, beta/mu, 0)
    std::optional<OdeState> endemic;
};

void validate_params(const OdeParams& p);

double ode_r0(const OdeParams& p);

OdeEquilibria ode_equilibria(const OdeParams& p);

/// Classical RK4 step of the three-field system. Throws StepRejected when
/// the step drives a component negative beyond roundoff.
OdeState ode_step(const OdeState& s, const OdeParams& p, double dt);

struct OdeReducedState {
    double h_i = 0.0;
    double v_i = 0.0;
};

/// RK4 step of the reduced two-field cooperative system, where the
/// uninfected vectors are slaved to (beta/mu - v_i)+.
OdeReducedState ode_reduced_step(const OdeReducedState& s, const OdeParams& p, double dt);

enum class OdeVerdict { Extinct, InfectionFree, Endemic, Unsettled };

const char* ode_verdict_name(OdeVerdict v);

struct OdeRunOptions {
    double dt = 0.0; // 0 picks a stability-capped step
    double horizon = 200.0;
    double settle_tol = 1e-10;
    double sample_dt = 0.25;
};

struct OdeRunResult {
    std::vector<double> t, h_i, v_u, v_i;
    OdeState final_state;
    bool settled = false;
    double settle_time = 0.0;
    OdeVerdict verdict = OdeVerdict::Unsettled;
    double r0 = 0.0;
};

/// Integrates until the motion per unit time drops below settle_tol or the
/// horizon is reached, then classifies the terminal state against the
/// closed-form equilibria at threshold 20*settle_tol.
OdeRunResult ode_run(const OdeState& initial, const OdeParams& p, const OdeRunOptions& opts);

} // namespace vhrd
