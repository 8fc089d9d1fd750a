#include "vhrd/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vhrd/errors.hpp"

namespace vhrd {

void validate_params(const OdeParams& p) {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("ode parameter ") + name + " must be strictly positive");
    };
    check(p.lambda, "lambda");
    check(p.sigma1, "sigma1");
    check(p.sigma2, "sigma2");
    check(p.beta, "beta");
    check(p.mu, "mu");
    check(p.h_u, "h_u");
}

double ode_r0(const OdeParams& p) {
    validate_params(p);
    return p.sigma1 * p.sigma2 * p.h_u / (p.lambda * p.mu);
}

OdeEquilibria ode_equilibria(const OdeParams& p) {
    double r0 = ode_r0(p);
    OdeEquilibria eq;
    eq.infection_free = {0.0, p.beta / p.mu, 0.0, 0.0};
    if (r0 > 1.0) {
        eq.endemic = OdeState{p.beta * (r0 - 1.0) / p.sigma2, p.beta / (r0 * p.mu),
                              p.lambda * p.beta * (r0 - 1.0) / (p.h_u * p.sigma1 * p.sigma2), 0.0};
    }
    return eq;
}

namespace {

struct Rhs {
    double h, u, i;
};

Rhs full_rhs(const OdeParams& p, double h, double vu, double vi) {
    double n = vu + vi;
    return {-p.lambda * h + p.sigma1 * p.h_u * vi,
            -p.sigma2 * vu * h + p.beta * n - p.mu * n * vu,
            p.sigma2 * vu * h - p.mu * n * vi};
}

void reject_if_negative(double value, double scale, double dt) {
    if (value < -1e-10 * std::max(1.0, scale))
        throw StepRejected("ode step produced a negative component (" + std::to_string(value) +
                               "); dt " + std::to_string(dt) + " is too large",
                           0.5 * dt);
}

double stable_dt(const OdeParams& p, const OdeState& s) {
    double n = s.v_u + s.v_i;
    double rate = p.lambda + p.sigma2 * s.h_i + 2.0 * p.mu * n + p.beta;
    return 0.5 / rate;
}

} // namespace

OdeState ode_step(const OdeState& s, const OdeParams& p, double dt) {
    validate_params(p);
    if (!(dt > 0.0)) throw std::invalid_argument("ode_step: dt must be positive");
    Rhs k1 = full_rhs(p, s.h_i, s.v_u, s.v_i);
    Rhs k2 = full_rhs(p, s.h_i + 0.5 * dt * k1.h, s.v_u + 0.5 * dt * k1.u, s.v_i + 0.5 * dt * k1.i);
    Rhs k3 = full_rhs(p, s.h_i + 0.5 * dt * k2.h, s.v_u + 0.5 * dt * k2.u, s.v_i + 0.5 * dt * k2.i);
    Rhs k4 = full_rhs(p, s.h_i + dt * k3.h, s.v_u + dt * k3.u, s.v_i + dt * k3.i);

    OdeState out;
    out.h_i = s.h_i + dt / 6.0 * (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h);
    out.v_u = s.v_u + dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    out.v_i = s.v_i + dt / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
    out.t = s.t + dt;
    double scale = std::max({std::abs(out.h_i), std::abs(out.v_u), std::abs(out.v_i)});
    reject_if_negative(out.h_i, scale, dt);
    reject_if_negative(out.v_u, scale, dt);
    reject_if_negative(out.v_i, scale, dt);
    return out;
}

OdeReducedState ode_reduced_step(const OdeReducedState& s, const OdeParams& p, double dt) {
    validate_params(p);
    if (!(dt > 0.0)) throw std::invalid_argument("ode_reduced_step: dt must be positive");
    double cap = p.beta / p.mu;
    auto rhs = [&](double h, double v) {
        double room = std::max(cap - v, 0.0);
        return std::pair<double, double>{-p.lambda * h + p.sigma1 * p.h_u * v,
                                         p.sigma2 * room * h - p.beta * v};
    };
    auto [k1h, k1v] = rhs(s.h_i, s.v_i);
    auto [k2h, k2v] = rhs(s.h_i + 0.5 * dt * k1h, s.v_i + 0.5 * dt * k1v);
    auto [k3h, k3v] = rhs(s.h_i + 0.5 * dt * k2h, s.v_i + 0.5 * dt * k2v);
    auto [k4h, k4v] = rhs(s.h_i + dt * k3h, s.v_i + dt * k3v);

    OdeReducedState out;
    out.h_i = s.h_i + dt / 6.0 * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
    out.v_i = s.v_i + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    double scale = std::max(std::abs(out.h_i), std::abs(out.v_i));
    reject_if_negative(out.h_i, scale, dt);
    reject_if_negative(out.v_i, scale, dt);
    return out;
}

const char* ode_verdict_name(OdeVerdict v) {
    switch (v) {
        case OdeVerdict::Extinct: return "ss0";
        case OdeVerdict::InfectionFree: return "ss1";
        case OdeVerdict::Endemic: return "ss2";
        default: return "unsettled";
    }
}

OdeRunResult ode_run(const OdeState& initial, const OdeParams& p, const OdeRunOptions& opts) {
    validate_params(p);
    if (!(opts.horizon > 0.0) || !(opts.settle_tol > 0.0) || !(opts.sample_dt > 0.0))
        throw std::invalid_argument("ode_run: horizon, settle_tol, sample_dt must be positive");

    OdeRunResult out;
    out.r0 = ode_r0(p);
    OdeEquilibria eq = ode_equilibria(p);

    OdeState s = initial;
    s.t = 0.0;
    auto sample = [&](const OdeState& st) {
        out.t.push_back(st.t);
        out.h_i.push_back(st.h_i);
        out.v_u.push_back(st.v_u);
        out.v_i.push_back(st.v_i);
    };
    sample(s);
    double next_sample = opts.sample_dt;

    while (s.t < opts.horizon) {
        double dt = opts.dt > 0.0 ? opts.dt : stable_dt(p, s);
        dt = std::min(dt, opts.horizon - s.t);
        OdeState next = ode_step(s, p, dt);
        double rate = std::max({std::abs(next.h_i - s.h_i), std::abs(next.v_u - s.v_u),
                                std::abs(next.v_i - s.v_i)}) /
                      dt;
        s = next;
        if (s.t >= next_sample - 1e-12) {
            sample(s);
            while (next_sample <= s.t + 1e-12) next_sample += opts.sample_dt;
        }
        if (rate < opts.settle_tol) {
            out.settled = true;
            out.settle_time = s.t;
            break;
        }
    }
    if (out.t.back() != s.t) sample(s);
    out.final_state = s;

    auto dist = [&](const OdeState& e) {
        return std::max({std::abs(s.h_i - e.h_i), std::abs(s.v_u - e.v_u),
                         std::abs(s.v_i - e.v_i)});
    };
    double d0 = dist(eq.extinction);
    double d1 = dist(eq.infection_free);
    double best = d0;
    OdeVerdict v = OdeVerdict::Extinct;
    if (d1 < best) {
        best = d1;
        v = OdeVerdict::InfectionFree;
    }
    if (eq.endemic) {
        double d2 = dist(*eq.endemic);
        if (d2 < best) {
            best = d2;
            v = OdeVerdict::Endemic;
        }
    }
    out.verdict = best < 20.0 * opts.settle_tol ? v : OdeVerdict::Unsettled;
    return out;
}

} // namespace vhrd
