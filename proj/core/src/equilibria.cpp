#include "vhrd/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "vhrd/errors.hpp"
#include "vhrd/r0.hpp"

namespace vhrd {

namespace {

double sup(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

} // namespace

Field compute_vhat(const ModelCoefficients& c, double tol, double linear_tol) {
    validate_coefficients(c);
    const Grid& g = c.delta2.grid;
    SparseOperator l2 = assemble_diffusion(c.delta2);
    const auto n = static_cast<std::size_t>(g.size());

    Field v = constant_field(g, 0.0);
    for (int i = 0; i < g.size(); ++i) v[i] = c.beta[i] / c.mu[i];

    auto residual = [&](const Field& u, std::vector<double>& out) {
        l2.apply(u.values.data(), out.data());
        for (std::size_t i = 0; i < n; ++i)
            out[i] += c.beta.values[i] * u.values[i] - c.mu.values[i] * u.values[i] * u.values[i];
    };

    std::vector<double> f(n), ft(n);
    residual(v, f);
    double fnorm = sup(f);

    for (int iter = 0; iter < 50; ++iter) {
        if (fnorm <= tol) {
            if (!(field_min(v) > 0.0))
                throw SolverError("compute_vhat: carrying capacity lost positivity");
            return v;
        }
        // Newton system: (diag(2 mu V - beta) - L2) d = F, then V += d
        std::vector<double> jdiag(n);
        for (std::size_t i = 0; i < n; ++i)
            jdiag[i] = 2.0 * c.mu.values[i] * v.values[i] - c.beta.values[i];
        SparseOperator a = diag_minus(jdiag, l2);
        std::vector<double> d = solve_linear(a, f, linear_tol);

        double alpha = 1.0;
        bool accepted = false;
        Field trial = v;
        for (int h = 0; h < 40; ++h) {
            for (std::size_t i = 0; i < n; ++i) trial.values[i] = v.values[i] + alpha * d[i];
            if (field_min(trial) > 0.0) {
                residual(trial, ft);
                double fn = sup(ft);
                if (fn <= (1.0 - 0.25 * alpha) * fnorm || fn <= tol) {
                    v = trial;
                    f = ft;
                    fnorm = fn;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw SolverError("compute_vhat: damped Newton stalled at residual " + sci(fnorm));
    }
    throw SolverError("compute_vhat: no convergence after 50 Newton steps");
}

namespace {

/// Cached operators for repeated applications of the endemic map.
struct EndemicContext {
    const ModelCoefficients& c;
    const Field& vhat;
    double c2;
    double linear_tol;
    SparseOperator host_op;  // diag(lambda) - L1
    SparseOperator outer_op; // diag(c2) - L2
    SparseOperator l2;
    std::vector<double> warm_w, warm_out;

    EndemicContext(const ModelCoefficients& coeffs, const Field& vh, double shift, double lt)
        : c(coeffs), vhat(vh), c2(shift), linear_tol(lt) {
        SparseOperator l1 = assemble_diffusion(c.delta1);
        l2 = assemble_diffusion(c.delta2);
        host_op = diag_minus(c.lambda.values, l1);
        std::vector<double> shift_vec(vh.values.size(), shift);
        outer_op = diag_minus(shift_vec, l2);
    }

    /// f(v) and the sup-norm residual of the stationary vector equation at v.
    Field apply(const Field& v, double* residual_out) {
        const auto n = v.values.size();
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = c.sigma1.values[i] * c.h_u.values[i] * v.values[i];
        std::vector<double> w = solve_linear(host_op, rhs, linear_tol, 0,
                                             warm_w.empty() ? nullptr : &warm_w);
        warm_w = w;
        for (std::size_t i = 0; i < n; ++i) {
            double vu = std::max(vhat.values[i] - v.values[i], 0.0);
            rhs[i] = c.sigma2.values[i] * vu * w[i] +
                     (c2 - c.mu.values[i] * vhat.values[i]) * v.values[i];
        }
        if (residual_out) {
            // F(v) = rhs - (c2 - L2) v, identical to the stationary residual
            std::vector<double> av(n);
            outer_op.apply(v.values.data(), av.data());
            double r = 0.0;
            for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(rhs[i] - av[i]));
            *residual_out = r;
        }
        std::vector<double> out = solve_linear(outer_op, rhs, linear_tol, 0,
                                               warm_out.empty() ? nullptr : &warm_out);
        warm_out = out;
        return Field{v.grid, std::move(out)};
    }
};

/// Sup of the infected-host response over the iteration box [0, 2 vhat].
double box_gain(const ModelCoefficients& c, const Field& vhat) {
    double gain_max = 0.0;
    for (std::size_t i = 0; i < vhat.values.size(); ++i)
        gain_max = std::max(gain_max, c.sigma1.values[i] * c.h_u.values[i]);
    return 2.0 * gain_max * field_max(vhat) / field_min(c.lambda);
}

double default_c2(const ModelCoefficients& c, const Field& vhat) {
    // bounds the map's gain over the iteration box [0, 2 vhat]
    double mu_vhat_max = 0.0;
    for (std::size_t i = 0; i < vhat.values.size(); ++i)
        mu_vhat_max = std::max(mu_vhat_max, c.mu.values[i] * vhat.values[i]);
    return mu_vhat_max + field_max(c.sigma2) * box_gain(c, vhat) + 1.0;
}

} // namespace

Field endemic_fixed_point_map(const Field& v_i, const ModelCoefficients& c, const Field& vhat,
                              double c2, double linear_tol) {
    validate_coefficients(c);
    if (!(v_i.grid == vhat.grid) || !(v_i.grid == c.delta1.grid))
        throw std::invalid_argument("endemic_fixed_point_map: grid mismatch");
    if (!(c2 > 0.0)) throw std::invalid_argument("endemic_fixed_point_map: c2 must be positive");
    EndemicContext ctx(c, vhat, c2, linear_tol);
    return ctx.apply(v_i, nullptr);
}

std::optional<EndemicPair> compute_endemic(const ModelCoefficients& c, const Field& vhat,
                                           double tol, std::optional<double> r0_hint) {
    validate_coefficients(c);
    if (!(vhat.grid == c.delta1.grid))
        throw std::invalid_argument("compute_endemic: vhat grid mismatch");

    double r0 = r0_hint ? *r0_hint : reproduction_number_direct(c, vhat);
    if (r0 <= 1.0) return std::nullopt;

    const auto n = vhat.values.size();
    double linear_tol = std::min(kDefaultLinearTol, 0.01 * tol);
    EndemicContext ctx(c, vhat, default_c2(c, vhat), linear_tol);

    // ordering comparisons must absorb the inexactness of the inner solves:
    // each map application carries up to ~linear_tol * sqrt(n) * (box scale)
    double box_scale = 1.0 + 2.0 * field_max(vhat) + box_gain(c, vhat);
    double slack = std::max(1e-12 * (1.0 + 2.0 * field_max(vhat)),
                            10.0 * linear_tol * std::sqrt(static_cast<double>(n)) * box_scale);

    // sub-solution seed: infected-vector block of the principal eigenvector
    EigenResult eig = cooperative_principal_eigenvalue(c, vhat);
    Field psi = constant_field(vhat.grid, 0.0);
    for (std::size_t i = 0; i < n; ++i) psi.values[i] = eig.vector[i + n];
    double psi_max = field_max(psi);
    for (auto& x : psi.values) x /= psi_max;

    double eps = 0.5 * field_min(vhat); // psi is sup-normalized, so eps*psi <= vhat/2
    Field lo = constant_field(vhat.grid, 0.0);
    bool seeded = false;
    for (int h = 0; h < 60; ++h) {
        for (std::size_t i = 0; i < n; ++i) lo.values[i] = eps * psi.values[i];
        Field mapped = ctx.apply(lo, nullptr);
        bool grows = true;
        for (std::size_t i = 0; i < n; ++i)
            if (mapped.values[i] < lo.values[i] - slack) {
                grows = false;
                break;
            }
        if (grows) {
            seeded = true;
            break;
        }
        eps *= 0.5;
    }
    if (!seeded)
        throw SolverError("compute_endemic: no sub-solution scale found; R0 = " +
                          std::to_string(r0) + " is too close to 1 for this tolerance");

    Field hi = vhat;
    for (auto& x : hi.values) x *= 2.0;

    double res_lo = 1.0, res_hi = 1.0;
    const int cap = 500000;
    for (int iter = 0; iter < cap; ++iter) {
        Field lo_next = ctx.apply(lo, &res_lo);
        Field hi_next = ctx.apply(hi, &res_hi);
        for (std::size_t i = 0; i < n; ++i) {
            if (lo_next.values[i] < lo.values[i] - slack ||
                hi_next.values[i] > hi.values[i] + slack ||
                lo_next.values[i] > hi_next.values[i] + slack)
                throw SolverError(
                    "compute_endemic: monotone bracketing violated; shift c2 too small");
        }
        lo = std::move(lo_next);
        hi = std::move(hi_next);
        if (sup_distance(lo, hi) <= tol && res_lo <= tol && res_hi <= tol) break;
        if (iter == cap - 1)
            throw SolverError("compute_endemic: monotone iteration hit the cap at gap " +
                              sci(sup_distance(lo, hi)));
    }

    EndemicPair out;
    out.v_i = lo;
    for (std::size_t i = 0; i < n; ++i)
        out.v_i.values[i] = 0.5 * (lo.values[i] + hi.values[i]);

    if (!(field_min(out.v_i) > 0.0))
        throw SolverError("compute_endemic: infected-vector profile lost positivity");
    for (std::size_t i = 0; i < n; ++i)
        if (out.v_i.values[i] >= vhat.values[i] + slack)
            throw SolverError("compute_endemic: infected vectors exceed carrying capacity");

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = c.sigma1.values[i] * c.h_u.values[i] * out.v_i.values[i];
    out.h_i = Field{vhat.grid, solve_linear(ctx.host_op, rhs, linear_tol)};
    if (!(field_min(out.h_i) > 0.0))
        throw SolverError("compute_endemic: infected-host profile lost positivity");

    // full stationary residual of all three equations
    std::vector<double> t1(n), t2(n);
    double res = 0.0;
    ctx.host_op.apply(out.h_i.values.data(), t1.data());
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(rhs[i] - t1[i]));

    ctx.l2.apply(out.v_i.values.data(), t1.data());
    for (std::size_t i = 0; i < n; ++i) {
        double vu = std::max(vhat.values[i] - out.v_i.values[i], 0.0);
        double r3 = t1[i] + c.sigma2.values[i] * vu * out.h_i.values[i] -
                    c.mu.values[i] * vhat.values[i] * out.v_i.values[i];
        res = std::max(res, std::abs(r3));
    }
    for (std::size_t i = 0; i < n; ++i) t2[i] = vhat.values[i] - out.v_i.values[i];
    ctx.l2.apply(t2.data(), t1.data());
    for (std::size_t i = 0; i < n; ++i) {
        double vu = t2[i];
        double r2 = t1[i] - c.sigma2.values[i] * std::max(vu, 0.0) * out.h_i.values[i] +
                    c.beta.values[i] * vhat.values[i] -
                    c.mu.values[i] * vhat.values[i] * vu;
        res = std::max(res, std::abs(r2));
    }
    if (res > 10.0 * tol)
        throw SolverError("compute_endemic: stationary residual " + sci(res) +
                          " exceeds 10x tolerance");
    return out;
}

EquilibriumSet enumerate_equilibria(const ModelCoefficients& c, double tol) {
    EquilibriumSet set;
    set.vhat = compute_vhat(c, std::min(1e-10, 0.1 * tol));
    set.r0 = reproduction_number_direct(c, set.vhat);

    const Grid& g = set.vhat.grid;
    Field zero = constant_field(g, 0.0);
    set.extinction = Equilibrium{zero, zero, zero};
    set.infection_free = Equilibrium{zero, set.vhat, zero};

    if (auto ee = compute_endemic(c, set.vhat, tol, set.r0)) {
        Field v_u = set.vhat;
        for (std::size_t i = 0; i < v_u.values.size(); ++i) v_u.values[i] -= ee->v_i.values[i];
        set.endemic = Equilibrium{ee->h_i, std::move(v_u), ee->v_i};
    }
    return set;
}

} // namespace vhrd
