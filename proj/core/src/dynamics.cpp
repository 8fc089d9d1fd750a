#include "vhrd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vhrd/errors.hpp"
#include "vhrd/r0.hpp"

namespace vhrd {

namespace {

SparseOperator identity_minus_scaled(const SparseOperator& l, double dt) {
    std::vector<Triplet> trip;
    trip.reserve(l.nnz() + static_cast<std::size_t>(l.dim()));
    const auto& rp = l.row_ptr();
    for (int r = 0; r < l.dim(); ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            trip.push_back({r, l.cols()[static_cast<std::size_t>(k)],
                            -dt * l.values()[static_cast<std::size_t>(k)]});
    for (int r = 0; r < l.dim(); ++r) trip.push_back({r, r, 1.0});
    return SparseOperator::from_triplets(l.dim(), std::move(trip));
}

double negativity_floor(double scale) { return -1e-10 * std::max(1.0, scale); }

void check_nonnegative(const std::vector<double>& v, double scale, double dt) {
    double floor = negativity_floor(scale);
    for (double x : v)
        if (x < floor)
            throw StepRejected("time step produced a negative state entry (" +
                                   std::to_string(x) + "); dt " + std::to_string(dt) +
                                   " is too large",
                               0.5 * dt);
}

/// Caches the implicit-diffusion operators for the current dt and the CG
/// warm starts for each field.
struct FullStepper {
    const ModelCoefficients& c;
    SparseOperator l1, l2;
    double built_dt = -1.0;
    SparseOperator a1, a2; // I - dt L
    std::vector<double> warm_h, warm_vu, warm_vi;
    double linear_tol;

    FullStepper(const ModelCoefficients& coeffs, double lt)
        : c(coeffs), l1(assemble_diffusion(coeffs.delta1)), l2(assemble_diffusion(coeffs.delta2)),
          linear_tol(lt) {}

    void ensure_dt(double dt) {
        if (dt == built_dt) return;
        a1 = identity_minus_scaled(l1, dt);
        a2 = identity_minus_scaled(l2, dt);
        built_dt = dt;
    }

    SimState step(const SimState& s, double dt) {
        ensure_dt(dt);
        const auto n = s.h_i.values.size();
        std::vector<double> h = solve_linear(a1, s.h_i.values, linear_tol, 0,
                                             warm_h.empty() ? nullptr : &warm_h);
        std::vector<double> vu = solve_linear(a2, s.v_u.values, linear_tol, 0,
                                              warm_vu.empty() ? nullptr : &warm_vu);
        std::vector<double> vi = solve_linear(a2, s.v_i.values, linear_tol, 0,
                                              warm_vi.empty() ? nullptr : &warm_vi);
        warm_h = h;
        warm_vu = vu;
        warm_vi = vi;

        SimState out = s;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double total = vu[i] + vi[i];
            double infect = c.sigma2.values[i] * vu[i] * h[i];
            out.h_i.values[i] =
                h[i] + dt * (-c.lambda.values[i] * h[i] +
                             c.sigma1.values[i] * c.h_u.values[i] * vi[i]);
            out.v_u.values[i] =
                vu[i] + dt * (-infect + c.beta.values[i] * total -
                              c.mu.values[i] * total * vu[i]);
            out.v_i.values[i] = vi[i] + dt * (infect - c.mu.values[i] * total * vi[i]);
            scale = std::max({scale, std::abs(out.h_i.values[i]), std::abs(out.v_u.values[i]),
                              std::abs(out.v_i.values[i])});
        }
        check_nonnegative(out.h_i.values, scale, dt);
        check_nonnegative(out.v_u.values, scale, dt);
        check_nonnegative(out.v_i.values, scale, dt);
        out.t = s.t + dt;
        return out;
    }

    /// The post-diffusion iterate; at the scheme's fixed point this solves
    /// the stationary system exactly.
    SimState half_step(const SimState& s, double dt) {
        ensure_dt(dt);
        SimState out = s;
        out.h_i.values = solve_linear(a1, s.h_i.values, linear_tol);
        out.v_u.values = solve_linear(a2, s.v_u.values, linear_tol);
        out.v_i.values = solve_linear(a2, s.v_i.values, linear_tol);
        return out;
    }
};

struct LogisticStepper {
    const ModelCoefficients& c;
    SparseOperator l2;
    double built_dt = -1.0;
    SparseOperator a2;
    std::vector<double> warm;
    double linear_tol;

    LogisticStepper(const ModelCoefficients& coeffs, double lt)
        : c(coeffs), l2(assemble_diffusion(coeffs.delta2)), linear_tol(lt) {}

    Field step(const Field& v, double dt) {
        if (dt != built_dt) {
            a2 = identity_minus_scaled(l2, dt);
            built_dt = dt;
        }
        std::vector<double> vs =
            solve_linear(a2, v.values, linear_tol, 0, warm.empty() ? nullptr : &warm);
        warm = vs;
        Field out = v;
        double scale = 0.0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            out.values[i] =
                vs[i] + dt * (c.beta.values[i] * vs[i] - c.mu.values[i] * vs[i] * vs[i]);
            scale = std::max(scale, std::abs(out.values[i]));
        }
        check_nonnegative(out.values, scale, dt);
        return out;
    }
};

double state_sup(const SimState& s) {
    return std::max({sup_norm(s.h_i), sup_norm(s.v_u), sup_norm(s.v_i)});
}

double rate_bound(const ModelCoefficients& c, double sup_h, double sup_v) {
    return field_max(c.lambda) + field_max(c.sigma2) * sup_h + 2.0 * field_max(c.mu) * sup_v +
           field_max(c.beta);
}

} // namespace

SimState step_full(const SimState& s, const ModelCoefficients& c, double dt, double linear_tol) {
    validate_coefficients(c);
    if (!(dt > 0.0)) throw std::invalid_argument("step_full: dt must be positive");
    FullStepper st(c, linear_tol);
    return st.step(s, dt);
}

LimitState step_limit(const LimitState& s, const ModelCoefficients& c, const Field& vhat,
                      double dt, double linear_tol) {
    validate_coefficients(c);
    if (!(dt > 0.0)) throw std::invalid_argument("step_limit: dt must be positive");
    SparseOperator a1 = identity_minus_scaled(assemble_diffusion(c.delta1), dt);
    SparseOperator a2 = identity_minus_scaled(assemble_diffusion(c.delta2), dt);
    std::vector<double> h = solve_linear(a1, s.h_i.values, linear_tol);
    std::vector<double> vi = solve_linear(a2, s.v_i.values, linear_tol);

    LimitState out = s;
    double scale = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double room = std::max(vhat.values[i] - vi[i], 0.0);
        out.h_i.values[i] = h[i] + dt * (-c.lambda.values[i] * h[i] +
                                         c.sigma1.values[i] * c.h_u.values[i] * vi[i]);
        out.v_i.values[i] =
            vi[i] + dt * (c.sigma2.values[i] * room * h[i] -
                          c.mu.values[i] * vhat.values[i] * vi[i]);
        scale = std::max({scale, std::abs(out.h_i.values[i]), std::abs(out.v_i.values[i])});
    }
    check_nonnegative(out.h_i.values, scale, dt);
    check_nonnegative(out.v_i.values, scale, dt);
    out.t = s.t + dt;
    return out;
}

Field step_logistic(const Field& v, const ModelCoefficients& c, double dt, double linear_tol) {
    validate_coefficients(c);
    if (!(dt > 0.0)) throw std::invalid_argument("step_logistic: dt must be positive");
    LogisticStepper st(c, linear_tol);
    return st.step(v, dt);
}

double boundedness_bound(const ModelCoefficients& c, const Field& vhat) {
    double v_cap = field_max(vhat) + 1.0;
    double gain_max = 0.0;
    for (std::size_t i = 0; i < vhat.values.size(); ++i)
        gain_max = std::max(gain_max, c.sigma1.values[i] * c.h_u.values[i]);
    return std::max(v_cap, gain_max * v_cap / field_min(c.lambda) + 1.0);
}

double max_stable_dt(const ModelCoefficients& c, double box) {
    return 0.5 / rate_bound(c, box, box);
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Extinct: return "E0";
        case Verdict::InfectionFree: return "E1";
        case Verdict::Endemic: return "E2";
        default: return "unsettled";
    }
}

namespace {

void append_sample(TrajectoryRecord& rec, const SimState& s, const Field& vhat) {
    rec.t.push_back(s.t);
    rec.h_i_sup.push_back(sup_norm(s.h_i));
    rec.v_u_sup.push_back(sup_norm(s.v_u));
    rec.v_i_sup.push_back(sup_norm(s.v_i));
    double verr = 0.0, vmin = 0.0;
    for (std::size_t i = 0; i < vhat.values.size(); ++i) {
        verr = std::max(verr,
                        std::abs(s.v_u.values[i] + s.v_i.values[i] - vhat.values[i]));
        vmin = std::min({vmin, s.h_i.values[i], s.v_u.values[i], s.v_i.values[i]});
    }
    rec.v_total_err_sup.push_back(verr);
    rec.min_value.push_back(vmin);
}

double classify_distance(const SimState& s, const Field& h, const Field& vu, const Field& vi) {
    return std::max({sup_distance(s.h_i, h), sup_distance(s.v_u, vu), sup_distance(s.v_i, vi)});
}

} // namespace

RunResult run_until_steady(const SimState& initial, const ModelCoefficients& c,
                           const RunOptions& opts) {
    validate_coefficients(c);
    if (!(initial.h_i.grid == c.delta1.grid))
        throw std::invalid_argument("run_until_steady: state grid mismatch");
    if (!(opts.horizon > 0.0) || !(opts.settle_tol > 0.0) || !(opts.sample_dt > 0.0))
        throw std::invalid_argument("run_until_steady: horizon, settle_tol, sample_dt must be positive");

    RunResult out;
    out.vhat = compute_vhat(c, 1e-10, opts.linear_tol);
    double box = boundedness_bound(c, out.vhat);

    FullStepper stepper(c, opts.linear_tol);
    SimState state = initial;
    state.t = 0.0;

    std::vector<double> snaps = opts.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
        out.snapshots.push_back(state);
        ++next_snap;
    }

    append_sample(out.record, state, out.vhat);
    double next_sample = opts.sample_dt;
    double plateau_dt = 0.0;
    double last_dt = 0.0;

    while (state.t < opts.horizon) {
        double sup_h = sup_norm(state.h_i);
        double sup_v = sup_norm(state.v_u) + sup_norm(state.v_i);
        double cap = 0.5 / rate_bound(c, std::max(sup_h, box), std::max(sup_v, box));
        double dt = opts.dt > 0.0 ? opts.dt : cap;
        if (opts.dt <= 0.0) {
            // hold dt on a plateau so the cached operators and warm starts pay off
            if (plateau_dt > 0.0 && plateau_dt <= cap && plateau_dt >= 0.5 * cap)
                dt = plateau_dt;
            else
                plateau_dt = dt;
        }
        dt = std::min(dt, opts.horizon - state.t);
        if (next_snap < snaps.size()) dt = std::min(dt, snaps[next_snap] - state.t);

        SimState next = stepper.step(state, dt);
        last_dt = dt;

        double rate = 0.0;
        for (std::size_t i = 0; i < state.h_i.values.size(); ++i) {
            rate = std::max({rate, std::abs(next.h_i.values[i] - state.h_i.values[i]),
                             std::abs(next.v_u.values[i] - state.v_u.values[i]),
                             std::abs(next.v_i.values[i] - state.v_i.values[i])});
        }
        rate /= dt;
        state = std::move(next);

        if (next_snap < snaps.size() && state.t >= snaps[next_snap] - 1e-12) {
            out.snapshots.push_back(state);
            ++next_snap;
        }
        if (state.t >= next_sample - 1e-12) {
            append_sample(out.record, state, out.vhat);
            while (next_sample <= state.t + 1e-12) next_sample += opts.sample_dt;
        }
        if (rate < opts.settle_tol) {
            out.settled = true;
            out.settle_time = state.t;
            break;
        }
    }
    if (out.record.t.back() != state.t) append_sample(out.record, state, out.vhat);
    out.final_state = state;

    // classification on the post-diffusion iterate
    SimState probe = last_dt > 0.0 ? stepper.half_step(state, last_dt) : state;
    const Grid& g = out.vhat.grid;
    Field zero = constant_field(g, 0.0);
    out.dist_extinct = classify_distance(probe, zero, zero, zero);
    out.dist_infection_free = classify_distance(probe, zero, out.vhat, zero);
    out.r0 = reproduction_number_direct(c, out.vhat);
    if (out.r0 > 1.001) {
        out.endemic = compute_endemic(c, out.vhat, 1e-8, out.r0);
        Field vu = out.vhat;
        for (std::size_t i = 0; i < vu.values.size(); ++i) vu.values[i] -= out.endemic->v_i.values[i];
        out.dist_endemic = classify_distance(probe, out.endemic->h_i, vu, out.endemic->v_i);
    }

    double threshold = 20.0 * opts.settle_tol;
    double best = out.dist_extinct;
    Verdict v = Verdict::Extinct;
    if (out.dist_infection_free < best) {
        best = out.dist_infection_free;
        v = Verdict::InfectionFree;
    }
    if (out.dist_endemic && *out.dist_endemic < best) {
        best = *out.dist_endemic;
        v = Verdict::Endemic;
    }
    out.verdict = best < threshold ? v : Verdict::Unsettled;
    return out;
}

double verify_logistic_reduction(const SimState& initial, const ModelCoefficients& c,
                                 const RunOptions& opts) {
    validate_coefficients(c);
    Field vhat = compute_vhat(c, 1e-10, opts.linear_tol);
    double box = boundedness_bound(c, vhat);

    FullStepper stepper(c, opts.linear_tol);
    LogisticStepper scalar(c, opts.linear_tol);

    SimState state = initial;
    state.t = 0.0;
    Field v = state.v_u;
    for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += state.v_i.values[i];

    double worst = 0.0;
    double plateau_dt = 0.0;
    while (state.t < opts.horizon) {
        double sup_h = sup_norm(state.h_i);
        double sup_v = sup_norm(state.v_u) + sup_norm(state.v_i);
        double cap = 0.5 / rate_bound(c, std::max(sup_h, box), std::max(sup_v, box));
        double dt = opts.dt > 0.0 ? opts.dt : cap;
        if (opts.dt <= 0.0) {
            if (plateau_dt > 0.0 && plateau_dt <= cap && plateau_dt >= 0.5 * cap)
                dt = plateau_dt;
            else
                plateau_dt = dt;
        }
        dt = std::min(dt, opts.horizon - state.t);

        SimState next = stepper.step(state, dt);
        v = scalar.step(v, dt);

        double rate = 0.0, dev = 0.0;
        for (std::size_t i = 0; i < v.values.size(); ++i) {
            rate = std::max({rate, std::abs(next.h_i.values[i] - state.h_i.values[i]),
                             std::abs(next.v_u.values[i] - state.v_u.values[i]),
                             std::abs(next.v_i.values[i] - state.v_i.values[i])});
            dev = std::max(dev, std::abs(next.v_u.values[i] + next.v_i.values[i] - v.values[i]));
        }
        rate /= dt;
        worst = std::max(worst, dev);
        state = std::move(next);
        if (rate < opts.settle_tol) break;
    }
    return worst;
}

double measure_decay_rate(const TrajectoryRecord& rec, RecordColumn column, double t_begin,
                          double t_end) {
    const std::vector<double>* col = nullptr;
    switch (column) {
        case RecordColumn::HostInfected: col = &rec.h_i_sup; break;
        case RecordColumn::VectorUninfected: col = &rec.v_u_sup; break;
        case RecordColumn::VectorInfected: col = &rec.v_i_sup; break;
        case RecordColumn::VectorTotalError: col = &rec.v_total_err_sup; break;
    }
    std::vector<double> ts, logs;
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
        if (rec.t[i] < t_begin || rec.t[i] > t_end) continue;
        double y = (*col)[i];
        if (!(y > 0.0))
            throw std::invalid_argument("measure_decay_rate: nonpositive norm in window");
        if (!logs.empty() && y > std::exp(logs.back()) * (1.0 + 1e-9))
            throw std::invalid_argument("measure_decay_rate: norms grow inside the window");
        ts.push_back(rec.t[i]);
        logs.push_back(std::log(y));
    }
    if (ts.size() < 3)
        throw std::invalid_argument("measure_decay_rate: window holds fewer than 3 samples");

    double tm = 0.0, lm = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tm += ts[i];
        lm += logs[i];
    }
    tm /= static_cast<double>(ts.size());
    lm /= static_cast<double>(ts.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        num += (ts[i] - tm) * (logs[i] - lm);
        den += (ts[i] - tm) * (ts[i] - tm);
    }
    if (den == 0.0) throw std::invalid_argument("measure_decay_rate: degenerate time window");
    return num / den;
}

} // namespace vhrd
