#pragma once

#include <cmath>
#include <random>

#include "vhrd/grid.hpp"

namespace vhrd::testing {

/// Constant-coefficient parameter bundle in the canonical order.
struct ConstParams {
    double delta1 = 1.0;
    double delta2 = 1.0;
    double lambda = 1.0;
    double beta = 1.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double mu = 1.0;
    double h_u = 1.0;
};

inline ModelCoefficients constant_coeffs(const Grid& g, const ConstParams& p) {
    return ModelCoefficients{
        constant_field(g, p.delta1), constant_field(g, p.delta2), constant_field(g, p.lambda),
        constant_field(g, p.beta),   constant_field(g, p.sigma1), constant_field(g, p.sigma2),
        constant_field(g, p.mu),     constant_field(g, p.h_u),
    };
}

/// R = sigma1 sigma2 h_u / (lambda mu) = 2, carrying capacity beta/mu = 1.
inline ConstParams reference_r2() {
    ConstParams p;
    p.sigma2 = 0.5;
    p.h_u = 4.0;
    return p;
}

/// Same shape with h_u = 1, so R = 0.5.
inline ConstParams reference_r05() {
    ConstParams p;
    p.sigma2 = 0.5;
    p.h_u = 1.0;
    return p;
}

/// Principal eigenvalue of the constant-mode cooperative block
/// [[-d1, a1], [a2, -d2]]: largest root of k^2 + (d1+d2)k + (d1 d2 - a1 a2).
inline double kappa0_constant(double d1, double a1, double a2, double d2) {
    double half = 0.5 * (d1 + d2);
    double disc = 0.25 * (d1 - d2) * (d1 - d2) + a1 * a2;
    return -half + std::sqrt(disc);
}

/// Coefficients with every entry drawn log-uniformly from [lo, hi].
inline ModelCoefficients random_constant_coeffs(const Grid& g, std::mt19937& rng, double lo = 0.25,
                                                double hi = 4.0) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    auto draw = [&] { return std::exp(u(rng)); };
    ConstParams p{draw(), draw(), draw(), draw(), draw(), draw(), draw(), draw()};
    return constant_coeffs(g, p);
}

/// Strictly positive heterogeneous field: base plus a random smooth bump.
inline Field random_bump_field(const Grid& g, std::mt19937& rng, double lo = 0.5, double hi = 2.0) {
    std::uniform_real_distribution<double> ub(lo, hi);
    std::uniform_real_distribution<double> uc(0.0, g.lx);
    std::uniform_real_distribution<double> uw(0.2 * g.lx, 0.8 * g.lx);
    double base = ub(rng);
    double amp = 0.8 * ub(rng);
    double center = uc(rng);
    double width = uw(rng);
    Field f = constant_field(g, 0.0);
    for (int i = 0; i < g.size(); ++i) {
        double s = (g.x(i) - center) / width;
        f[i] = base + amp * std::exp(-s * s);
    }
    return f;
}

inline ModelCoefficients random_heterogeneous_coeffs(const Grid& g, std::mt19937& rng) {
    return ModelCoefficients{
        random_bump_field(g, rng), random_bump_field(g, rng), random_bump_field(g, rng),
        random_bump_field(g, rng), random_bump_field(g, rng), random_bump_field(g, rng),
        random_bump_field(g, rng), random_bump_field(g, rng),
    };
}

} // namespace vhrd::testing
