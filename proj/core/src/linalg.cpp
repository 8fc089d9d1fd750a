#include "vhrd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vhrd/errors.hpp"

namespace vhrd {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

} // namespace

std::vector<double> solve_linear_action(const LinearAction& apply, int n,
                                        const std::vector<double>& b, double tol, int max_iter,
                                        const std::vector<double>* x0) {
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve_linear: size mismatch");
    if (max_iter <= 0) max_iter = 10 * n;

    std::vector<double> x(b.size(), 0.0);
    std::vector<double> r = b;
    std::vector<double> tmp(b.size());
    if (x0 && !x0->empty()) {
        x = *x0;
        apply(x, tmp);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - tmp[i];
    }

    double nb = norm2(b);
    if (nb == 0.0) return std::vector<double>(b.size(), 0.0);
    double target = tol * nb;

    std::vector<double> p = r;
    std::vector<double> q(b.size());
    double rho = dot(r, r);
    int restarts = 0;

    for (int k = 0; k < max_iter; ++k) {
        if (std::sqrt(rho) <= target) {
            // recurrence may have drifted; confirm with the true residual
            apply(x, tmp);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - tmp[i];
            double true_res = norm2(r);
            if (true_res <= 2.0 * target || restarts >= 2) return x;
            p = r;
            rho = dot(r, r);
            ++restarts;
            continue;
        }
        apply(p, q);
        double pq = dot(p, q);
        if (!(pq > 0.0))
            throw SolverError("conjugate gradients: operator is not positive definite");
        double alpha = rho / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        double rho_next = dot(r, r);
        double beta = rho_next / rho;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
        rho = rho_next;
    }
    throw SolverError("conjugate gradients: no convergence after " + std::to_string(max_iter) +
                      " iterations (residual " + std::to_string(std::sqrt(rho) / nb) +
                      " of target " + std::to_string(tol) + ")");
}

std::vector<double> solve_linear(const SparseOperator& a, const std::vector<double>& b, double tol,
                                 int max_iter, const std::vector<double>* x0) {
    LinearAction apply = [&a](const std::vector<double>& x, std::vector<double>& y) {
        a.apply(x.data(), y.data());
    };
    return solve_linear_action(apply, a.dim(), b, tol, max_iter, x0);
}

namespace {

void normalize2(std::vector<double>& v) {
    double n = norm2(v);
    for (auto& x : v) x /= n;
}

/// One inverse-power pass on a resolvent: v <- solve(v), Rayleigh estimate
/// and sup-norm residual measured on the original operator.
struct ResolventIteration {
    LinearAction original;              // A
    std::function<std::vector<double>(const std::vector<double>&, double)> solve; // (s-A)^{-1}
    int n = 0;
    // sup residuals of A stall near eps * ||A||_inf in double precision, so
    // the stop rule never asks for less than a few times that
    double opnorm_inf = 0.0;

    EigenResult run(double tol, int max_iter, const std::vector<double>* v0) {
        double floor = 4.0 * std::numeric_limits<double>::epsilon() * opnorm_inf;
        double effective_tol = std::max(tol, floor);
        std::vector<double> v(static_cast<std::size_t>(n), 1.0);
        if (v0) {
            if (static_cast<int>(v0->size()) != n)
                throw std::invalid_argument("eigen iteration: start vector size mismatch");
            v = *v0;
        }
        normalize2(v);
        std::vector<double> av(v.size());
        double res = 1.0;
        for (int k = 1; k <= max_iter; ++k) {
            double inner_tol = std::max(1e-13, std::min(1e-4, 0.1 * res));
            v = solve(v, inner_tol);
            normalize2(v);
            original(v, av);
            double value = dot(v, av);
            double vinf = norm_inf(v);
            res = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i)
                res = std::max(res, std::abs(av[i] - value * v[i]));
            res /= vinf;
            if (res <= effective_tol) {
                EigenResult out;
                out.value = value;
                out.vector = v;
                for (auto& x : out.vector) x /= vinf;
                for (double x : out.vector)
                    if (!(x > 0.0))
                        throw SolverError("principal eigenvector lost strict positivity");
                out.residual = res;
                out.iterations = k;
                return out;
            }
        }
        throw SolverError("eigenvalue iteration: no convergence after " +
                          std::to_string(max_iter) + " iterations (residual " +
                          std::to_string(res) + ")");
    }
};

} // namespace

EigenResult principal_eigenvalue(const Field& delta, const Field& f, double tol, int max_iter,
                                 const std::vector<double>* v0) {
    if (!(delta.grid == f.grid))
        throw std::invalid_argument("principal_eigenvalue: delta and f on different grids");
    if (max_iter <= 0) max_iter = 2000;

    SparseOperator lap = assemble_diffusion(delta);
    const int n = lap.dim();
    double s = field_max(f) + 1.0;

    // s - A = diag(s - f) - L is an irreducible M-matrix: SPD, inverse positive.
    std::vector<double> shift(f.values.size());
    for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = s - f.values[i];
    SparseOperator m = diag_minus(shift, lap);

    std::vector<double> warm;
    ResolventIteration it;
    it.n = n;
    double f_abs_max = 0.0;
    for (double v : f.values) f_abs_max = std::max(f_abs_max, std::abs(v));
    it.opnorm_inf = lap.inf_norm() + f_abs_max;
    it.original = [&lap, &f](const std::vector<double>& x, std::vector<double>& y) {
        lap.apply(x.data(), y.data());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += f.values[i] * x[i];
    };
    int cap = std::max(10 * n, 200000); // stiff operators need room beyond the 10n default
    it.solve = [&m, &warm, cap](const std::vector<double>& rhs, double inner_tol) {
        std::vector<double> y =
            solve_linear(m, rhs, inner_tol, cap, warm.empty() ? nullptr : &warm);
        warm = y;
        return y;
    };
    return it.run(tol, max_iter, v0);
}

EigenResult cooperative_principal_eigenvalue(const ModelCoefficients& c, const Field& vhat,
                                             double tol, int max_iter) {
    validate_coefficients(c);
    if (!(vhat.grid == c.delta1.grid))
        throw std::invalid_argument("cooperative_principal_eigenvalue: vhat grid mismatch");
    if (max_iter <= 0) max_iter = 2000;

    const int n = vhat.grid.size();
    SparseOperator l1 = assemble_diffusion(c.delta1);
    SparseOperator l2 = assemble_diffusion(c.delta2);

    std::vector<double> a1(static_cast<std::size_t>(n)); // sigma1 h_u
    std::vector<double> a2(static_cast<std::size_t>(n)); // sigma2 vhat
    std::vector<double> d1(static_cast<std::size_t>(n)); // lambda
    std::vector<double> d2(static_cast<std::size_t>(n)); // mu vhat
    for (int i = 0; i < n; ++i) {
        a1[static_cast<std::size_t>(i)] = c.sigma1[i] * c.h_u[i];
        a2[static_cast<std::size_t>(i)] = c.sigma2[i] * vhat[i];
        d1[static_cast<std::size_t>(i)] = c.lambda[i];
        d2[static_cast<std::size_t>(i)] = c.mu[i] * vhat[i];
    }

    double s_min = 0.0;
    double a1_max = 0.0, a2_max = 0.0;
    for (int i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        s_min = std::max({s_min, a1[k] - d1[k], a2[k] - d2[k]});
        a1_max = std::max(a1_max, a1[k]);
        a2_max = std::max(a2_max, a2[k]);
    }
    // Large enough that s - M is an M-matrix and the block sweep contracts.
    double s = s_min + std::sqrt(a1_max * a2_max) + 1.0;

    std::vector<double> s1(static_cast<std::size_t>(n)), s2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s1[static_cast<std::size_t>(i)] = s + d1[static_cast<std::size_t>(i)];
        s2[static_cast<std::size_t>(i)] = s + d2[static_cast<std::size_t>(i)];
    }
    SparseOperator m1 = diag_minus(s1, l1);
    SparseOperator m2 = diag_minus(s2, l2);

    std::vector<double> y1(static_cast<std::size_t>(n), 0.0);
    std::vector<double> y2(static_cast<std::size_t>(n), 0.0);
    bool have_warm = false;

    ResolventIteration it;
    it.n = 2 * n;
    double d1_max = 0.0, d2_max = 0.0;
    for (int i = 0; i < n; ++i) {
        auto k = static_cast<std::size_t>(i);
        d1_max = std::max(d1_max, d1[k]);
        d2_max = std::max(d2_max, d2[k]);
    }
    it.opnorm_inf = std::max(l1.inf_norm() + d1_max + a1_max, l2.inf_norm() + d2_max + a2_max);
    it.original = [&](const std::vector<double>& x, std::vector<double>& y) {
        l1.apply(x.data(), y.data());
        l2.apply(x.data() + n, y.data() + n);
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(i);
            y[k] += -d1[k] * x[k] + a1[k] * x[k + static_cast<std::size_t>(n)];
            y[k + static_cast<std::size_t>(n)] +=
                a2[k] * x[k] - d2[k] * x[k + static_cast<std::size_t>(n)];
        }
    };
    it.solve = [&](const std::vector<double>& rhs, double inner_tol) {
        // block Gauss-Seidel sweeps on (s - M) y = rhs
        if (!have_warm) {
            std::fill(y1.begin(), y1.end(), 0.0);
            std::fill(y2.begin(), y2.end(), 0.0);
        }
        std::vector<double> rhs1(static_cast<std::size_t>(n));
        std::vector<double> rhs2(static_cast<std::size_t>(n));
        double cg_tol = std::max(1e-14, 0.05 * inner_tol);
        int cap = std::max(10 * n, 200000);
        for (int sweep = 0; sweep < 200; ++sweep) {
            for (int i = 0; i < n; ++i) {
                auto k = static_cast<std::size_t>(i);
                rhs1[k] = rhs[k] + a1[k] * y2[k];
            }
            std::vector<double> y1_new = solve_linear(m1, rhs1, cg_tol, cap, &y1);
            for (int i = 0; i < n; ++i) {
                auto k = static_cast<std::size_t>(i);
                rhs2[k] = rhs[k + static_cast<std::size_t>(n)] + a2[k] * y1_new[k];
            }
            std::vector<double> y2_new = solve_linear(m2, rhs2, cg_tol, cap, &y2);
            double dy = 0.0, ny = 0.0;
            for (int i = 0; i < n; ++i) {
                auto k = static_cast<std::size_t>(i);
                dy = std::max({dy, std::abs(y1_new[k] - y1[k]), std::abs(y2_new[k] - y2[k])});
                ny = std::max({ny, std::abs(y1_new[k]), std::abs(y2_new[k])});
            }
            y1 = std::move(y1_new);
            y2 = std::move(y2_new);
            have_warm = true;
            if (sweep >= 1 && dy <= inner_tol * std::max(ny, 1e-300)) break;
        }
        std::vector<double> y(static_cast<std::size_t>(2 * n));
        std::copy(y1.begin(), y1.end(), y.begin());
        std::copy(y2.begin(), y2.end(), y.begin() + n);
        return y;
    };
    return it.run(tol, max_iter, nullptr);
}

RadiusResult spectral_radius_positive(const LinearAction& apply, int n, double tol, int max_iter,
                                      bool check_positive) {
    std::vector<double> x(static_cast<std::size_t>(n), 1.0);
    normalize2(x);
    std::vector<double> y(x.size());
    double prev = -1.0;
    for (int k = 1; k <= max_iter; ++k) {
        apply(x, y);
        double ny = norm2(y);
        if (ny < 1e-300) return {0.0, true, k};
        if (check_positive) {
            double floor = -1e-12 * norm_inf(y);
            for (double v : y)
                if (v < floor)
                    throw SolverError(
                        "spectral_radius_positive: iterate went negative; the operator does not "
                        "preserve positivity (assembly bug)");
        }
        double est = ny; // ||x|| == 1
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / ny;
        if (k >= 2 && std::abs(est - prev) <= tol * std::max(1.0, est))
            return {est, false, k};
        prev = est;
    }
    throw SolverError("spectral_radius_positive: no convergence after " +
                      std::to_string(max_iter) + " iterations");
}

} // namespace vhrd
