#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vhrd/equilibria.hpp"
#include "vhrd/grid.hpp"

namespace vhrd {

struct SimState {
    Field h_i;
    Field v_u;
    Field v_i;
    double t = 0.0;
};

struct LimitState {
    Field h_i;
    Field v_i;
    double t = 0.0;
};

/// One IMEX Euler step of the full three-field system: each field is
/// diffused implicitly, then the reaction terms are applied explicitly to
/// the diffused fields. Throws StepRejected when the result goes negative
/// beyond roundoff; the exception carries a safe dt.
SimState step_full(const SimState& s, const ModelCoefficients& c, double dt,
                   double linear_tol = 1e-12);

/// Same scheme for the two-field limit system on the carrying capacity.
/// Order-preserving: componentwise-ordered states stay ordered.
LimitState step_limit(const LimitState& s, const ModelCoefficients& c, const Field& vhat,
                      double dt, double linear_tol = 1e-12);

/// Same scheme for the scalar logistic vector equation.
Field step_logistic(const Field& v, const ModelCoefficients& c, double dt,
                    double linear_tol = 1e-12);

/// Sup-norm bound the dynamics eventually enter and keep.
double boundedness_bound(const ModelCoefficients& c, const Field& vhat);

/// Largest explicit-reaction-safe dt for states inside the given bound.
double max_stable_dt(const ModelCoefficients& c, double box);

enum class Verdict { Extinct, InfectionFree, Endemic, Unsettled };
std::string verdict_name(Verdict v);

struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<double> h_i_sup;
    std::vector<double> v_u_sup;
    std::vector<double> v_i_sup;
    std::vector<double> v_total_err_sup; ///< ||V_u + V_i - vhat||_inf
    std::vector<double> min_value;       ///< most negative entry across fields
};

struct RunOptions {
    double dt = 0.0; ///< 0 picks the stability cap each step
    double horizon = 200.0;
    double settle_tol = 1e-8;
    double sample_dt = 0.25;
    std::vector<double> snapshot_times;
    double linear_tol = 1e-12;
};

struct RunResult {
    TrajectoryRecord record;
    std::vector<SimState> snapshots;
    SimState final_state;
    bool settled = false;
    double settle_time = 0.0;
    Verdict verdict = Verdict::Unsettled;
    double dist_extinct = 0.0;
    double dist_infection_free = 0.0;
    std::optional<double> dist_endemic;
    double r0 = 0.0;
    Field vhat;
    std::optional<EndemicPair> endemic;
};

/// Integrates until the max nodewise rate of change drops below settle_tol
/// or the horizon is reached, then classifies the terminal state against
/// the equilibria at threshold 20*settle_tol. Classification looks at the
/// post-diffusion iterate: at the scheme's fixed point that iterate solves
/// the stationary system exactly, while the stored state carries an O(dt)
/// reaction offset.
RunResult run_until_steady(const SimState& initial, const ModelCoefficients& c,
                           const RunOptions& opts);

/// Integrates the scalar logistic equation in lockstep with the full system
/// from the same total vector density and reports the largest sup-norm gap
/// between V_u + V_i and the scalar solution over every step taken.
double verify_logistic_reduction(const SimState& initial, const ModelCoefficients& c,
                                 const RunOptions& opts);

enum class RecordColumn { HostInfected, VectorUninfected, VectorInfected, VectorTotalError };

/// Least-squares slope of log(norm) over samples with t in [t_begin, t_end].
/// Errors on empty windows, nonpositive norms, or norm growth inside the
/// window.
double measure_decay_rate(const TrajectoryRecord& rec, RecordColumn column, double t_begin,
                          double t_end);

} // namespace vhrd
