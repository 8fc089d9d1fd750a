#include "vhrd/r0.hpp"

#include <algorithm>
#include <cmath>

#include "vhrd/errors.hpp"

namespace vhrd {

namespace {

int linear_cap(int n) { return std::max(10 * n, 200000); }

struct R0Pieces {
    int n = 0;
    SparseOperator host_resolvent;   // diag(lambda) - L1
    SparseOperator vector_resolvent; // diag(mu vhat) - L2
    std::vector<double> host_gain;   // sigma1 h_u
    std::vector<double> vector_gain; // sigma2 vhat
    std::vector<double> lambda;
    std::vector<double> mu_vhat;
};

R0Pieces build_pieces(const ModelCoefficients& c, const Field& vhat) {
    validate_coefficients(c);
    if (!(vhat.grid == c.delta1.grid))
        throw std::invalid_argument("reproduction number: vhat grid mismatch");
    R0Pieces p;
    p.n = vhat.grid.size();
    SparseOperator l1 = assemble_diffusion(c.delta1);
    SparseOperator l2 = assemble_diffusion(c.delta2);
    p.lambda = c.lambda.values;
    p.mu_vhat.resize(vhat.values.size());
    p.host_gain.resize(vhat.values.size());
    p.vector_gain.resize(vhat.values.size());
    for (std::size_t i = 0; i < vhat.values.size(); ++i) {
        p.mu_vhat[i] = c.mu.values[i] * vhat.values[i];
        p.host_gain[i] = c.sigma1.values[i] * c.h_u.values[i];
        p.vector_gain[i] = c.sigma2.values[i] * vhat.values[i];
    }
    p.host_resolvent = diag_minus(p.lambda, l1);
    p.vector_resolvent = diag_minus(p.mu_vhat, l2);
    return p;
}

} // namespace

NextGenerationOperators assemble_next_generation(const ModelCoefficients& c, const Field& vhat) {
    validate_coefficients(c);
    if (!(vhat.grid == c.delta1.grid))
        throw std::invalid_argument("assemble_next_generation: vhat grid mismatch");
    const int n = vhat.grid.size();
    SparseOperator l1 = assemble_diffusion(c.delta1);
    SparseOperator l2 = assemble_diffusion(c.delta2);

    std::vector<Triplet> bt;
    bt.reserve(l1.nnz() + l2.nnz() + 3 * static_cast<std::size_t>(n));
    auto emit_block = [&bt](const SparseOperator& a, int roff, int coff) {
        const auto& rp = a.row_ptr();
        for (int r = 0; r < a.dim(); ++r)
            for (int k = rp[r]; k < rp[r + 1]; ++k)
                bt.push_back({r + roff, a.cols()[static_cast<std::size_t>(k)] + coff,
                              a.values()[static_cast<std::size_t>(k)]});
    };
    emit_block(l1, 0, 0);
    emit_block(l2, n, n);
    for (int i = 0; i < n; ++i) {
        bt.push_back({i, i, -c.lambda[i]});
        bt.push_back({i, i + n, c.sigma1[i] * c.h_u[i]});
        bt.push_back({i + n, i + n, -c.mu[i] * vhat[i]});
    }

    std::vector<Triplet> ct;
    ct.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ct.push_back({i + n, i, c.sigma2[i] * vhat[i]});

    NextGenerationOperators ops;
    ops.transition = SparseOperator::from_triplets(2 * n, std::move(bt));
    ops.infection = SparseOperator::from_triplets(2 * n, std::move(ct));
    return ops;
}

double reproduction_number_direct(const ModelCoefficients& c, const Field& vhat, double eigen_tol,
                                  double linear_tol) {
    R0Pieces p = build_pieces(c, vhat);
    const int n = p.n;
    std::vector<double> warm_psi, warm_phi;
    std::vector<double> rhs(static_cast<std::size_t>(n));

    LinearAction apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        // psi block of (-transition)^{-1} x, then host block, then infection
        std::copy(x.begin() + n, x.end(), rhs.begin());
        std::vector<double> psi =
            solve_linear(p.vector_resolvent, rhs, linear_tol, linear_cap(n),
                         warm_psi.empty() ? nullptr : &warm_psi);
        warm_psi = psi;
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(i);
            rhs[k] = x[k] + p.host_gain[k] * psi[k];
        }
        std::vector<double> phi = solve_linear(p.host_resolvent, rhs, linear_tol, linear_cap(n),
                                               warm_phi.empty() ? nullptr : &warm_phi);
        warm_phi = phi;
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(i);
            y[k] = 0.0;
            y[k + static_cast<std::size_t>(n)] = p.vector_gain[k] * phi[k];
        }
    };
    RadiusResult r = spectral_radius_positive(apply, 2 * n, eigen_tol, 20000, true);
    if (r.collapsed)
        throw SolverError("reproduction_number_direct: power iterate collapsed to zero");
    return r.value;
}

double reproduction_number_factored(const ModelCoefficients& c, const Field& vhat,
                                    double eigen_tol, double linear_tol) {
    R0Pieces p = build_pieces(c, vhat);
    const int n = p.n;
    std::vector<double> warm_v, warm_h;
    std::vector<double> rhs(static_cast<std::size_t>(n));

    LinearAction apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        // vector gain, vector resolvent, host gain, host resolvent
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(i);
            rhs[k] = p.vector_gain[k] * x[k];
        }
        std::vector<double> z = solve_linear(p.vector_resolvent, rhs, linear_tol, linear_cap(n),
                                             warm_v.empty() ? nullptr : &warm_v);
        warm_v = z;
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(i);
            rhs[k] = p.host_gain[k] * z[k];
        }
        y = solve_linear(p.host_resolvent, rhs, linear_tol, linear_cap(n),
                         warm_h.empty() ? nullptr : &warm_h);
        warm_h = y;
    };
    RadiusResult r = spectral_radius_positive(apply, n, eigen_tol, 20000, true);
    if (r.collapsed)
        throw SolverError("reproduction_number_factored: power iterate collapsed to zero");
    return r.value;
}

FactorRadii factored_radii(const ModelCoefficients& c, const Field& vhat, double eigen_tol,
                           double linear_tol) {
    R0Pieces p = build_pieces(c, vhat);
    const int n = p.n;
    std::vector<double> rhs(static_cast<std::size_t>(n));

    auto host = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i)
            rhs[static_cast<std::size_t>(i)] =
                p.lambda[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        y = solve_linear(p.host_resolvent, rhs, linear_tol, linear_cap(n));
    };
    auto vec = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i)
            rhs[static_cast<std::size_t>(i)] =
                p.mu_vhat[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        y = solve_linear(p.vector_resolvent, rhs, linear_tol, linear_cap(n));
    };
    FactorRadii out;
    out.host = spectral_radius_positive(host, n, eigen_tol, 20000, true).value;
    out.vector = spectral_radius_positive(vec, n, eigen_tol, 20000, true).value;
    std::vector<double> mid(static_cast<std::size_t>(n));
    auto combined = [&](const std::vector<double>& x, std::vector<double>& y) {
        vec(x, mid);
        host(mid, y);
    };
    out.combined = spectral_radius_positive(combined, n, eigen_tol, 20000, true).value;
    return out;
}

Field local_reproduction_number(const ModelCoefficients& c) {
    validate_coefficients(c);
    Field r = constant_field(c.delta1.grid, 0.0);
    for (int i = 0; i < r.size(); ++i)
        r[i] = c.sigma1[i] * c.h_u[i] * c.sigma2[i] / (c.lambda[i] * c.mu[i]);
    return r;
}

DiffusionLimits diffusion_limits(const ModelCoefficients& c) {
    validate_coefficients(c);
    const Grid& g = c.delta1.grid;
    Field r1 = constant_field(g, 0.0); // sigma1 h_u / lambda
    Field r2 = constant_field(g, 0.0); // sigma2 / mu
    for (int i = 0; i < g.size(); ++i) {
        r1[i] = c.sigma1[i] * c.h_u[i] / c.lambda[i];
        r2[i] = c.sigma2[i] / c.mu[i];
    }
    DiffusionLimits lim;
    lim.large = (integrate_field(r1, c.lambda) / integrate_field(c.lambda)) *
                (integrate_field(r2, c.mu) / integrate_field(c.mu));
    Field local = local_reproduction_number(c);
    lim.small = field_max(local);
    return lim;
}

SpectralReport spectral_report(const ModelCoefficients& c, const Field& vhat, double eigen_tol,
                               double linear_tol) {
    SpectralReport rep;
    rep.r0_direct = reproduction_number_direct(c, vhat, eigen_tol, linear_tol);
    rep.r0_factored = reproduction_number_factored(c, vhat, eigen_tol, linear_tol);
    rep.kappa0 = cooperative_principal_eigenvalue(c, vhat, eigen_tol).value;
    rep.local_r = local_reproduction_number(c);
    rep.local_r_min = field_min(rep.local_r);
    rep.local_r_max = field_max(rep.local_r);
    DiffusionLimits lim = diffusion_limits(c);
    rep.limit_large = lim.large;
    rep.limit_small = lim.small;
    return rep;
}

} // namespace vhrd
