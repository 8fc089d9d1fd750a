#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle/dense_oracle.hpp"
#include "support.hpp"
#include "vhrd/errors.hpp"
#include "vhrd/linalg.hpp"

using namespace vhrd;

namespace {

SparseOperator dense_to_sparse(const Eigen::MatrixXd& m) {
    std::vector<Triplet> trip;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) trip.push_back({i, j, m(i, j)});
    return SparseOperator::from_triplets(static_cast<int>(m.rows()), std::move(trip));
}

Eigen::MatrixXd random_spd(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = u(rng);
    return a * a.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

} // namespace

TEST_CASE("conjugate gradients on easy systems") {
    std::vector<double> b{1.0, -2.0, 3.0};
    SparseOperator eye = dense_to_sparse(Eigen::MatrixXd::Identity(3, 3));
    std::vector<double> x = solve_linear(eye, b);
    for (int i = 0; i < 3; ++i) CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(b[static_cast<std::size_t>(i)]));

    SparseOperator two = dense_to_sparse(2.0 * Eigen::MatrixXd::Identity(4, 4));
    std::vector<double> ones(4, 1.0);
    for (double v : solve_linear(two, ones)) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("conjugate gradients matches dense solve") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd a = random_spd(10, rng);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> b(10);
        for (double& v : b) v = u(rng);
        std::vector<double> want = oracle::dense_solve(a, b);
        std::vector<double> got = solve_linear(dense_to_sparse(a), b, 1e-13);
        for (int i = 0; i < 10; ++i)
            CHECK(got[static_cast<std::size_t>(i)] ==
                  doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-8));
    }
}

TEST_CASE("conjugate gradients rejects indefinite systems") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    a(2, 2) = -1.0;
    std::vector<double> b{0.0, 0.0, 1.0};
    CHECK_THROWS_AS(solve_linear(dense_to_sparse(a), b), SolverError);
}

TEST_CASE("conjugate gradients reports a hit iteration cap") {
    std::mt19937 rng(22);
    Eigen::MatrixXd a = random_spd(30, rng);
    std::vector<double> b(30, 1.0);
    CHECK_THROWS_AS(solve_linear(dense_to_sparse(a), b, 1e-14, 2), SolverError);
}

TEST_CASE("matrix-free action variant agrees") {
    std::mt19937 rng(23);
    Eigen::MatrixXd a = random_spd(8, rng);
    std::vector<double> b(8, 1.0);
    SparseOperator s = dense_to_sparse(a);
    LinearAction act = [&](const std::vector<double>& x, std::vector<double>& y) {
        s.apply(x.data(), y.data());
    };
    std::vector<double> x1 = solve_linear(s, b, 1e-12);
    std::vector<double> x2 = solve_linear_action(act, 8, b, 1e-12);
    for (int i = 0; i < 8; ++i)
        CHECK(x1[static_cast<std::size_t>(i)] ==
              doctest::Approx(x2[static_cast<std::size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("principal eigenvalue of a constant potential") {
    Grid g = build_grid(31, 1.5);
    EigenResult r = principal_eigenvalue(constant_field(g, 2.0), constant_field(g, -0.7));
    CHECK(r.value == doctest::Approx(-0.7).epsilon(1e-9));
    double lo = *std::min_element(r.vector.begin(), r.vector.end());
    double hi = *std::max_element(r.vector.begin(), r.vector.end());
    CHECK(hi == doctest::Approx(1.0));
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("principal eigenvalue matches the dense spectrum") {
    Grid g = build_grid(15, 1.0);
    Field delta = constant_field(g, 1.0);
    Field f = field_from_profile(g, RampProfile{-1.0, 1.0});
    EigenResult r = principal_eigenvalue(delta, f, 1e-10);

    Eigen::MatrixXd a = oracle::to_dense(assemble_diffusion(delta));
    for (int i = 0; i < g.size(); ++i) a(i, i) += f[i];
    CHECK(r.value == doctest::Approx(oracle::max_real_eigenvalue(a)).epsilon(1e-8));
    for (double v : r.vector) CHECK(v > 0.0);

    Grid g2 = build_grid(4, 5, 1.0, 2.0);
    std::mt19937 rng(31);
    Field delta2 = testing::random_bump_field(g2, rng);
    Field f2 = testing::random_bump_field(g2, rng);
    EigenResult r2 = principal_eigenvalue(delta2, f2, 1e-10);
    Eigen::MatrixXd a2 = oracle::to_dense(assemble_diffusion(delta2));
    for (int i = 0; i < g2.size(); ++i) a2(i, i) += f2[i];
    CHECK(r2.value == doctest::Approx(oracle::max_real_eigenvalue(a2)).epsilon(1e-8));
}

TEST_CASE("principal eigenvalue is monotone and shift equivariant") {
    Grid g = build_grid(41, 1.0);
    Field delta = constant_field(g, 0.5);
    Field f1 = field_from_profile(g, BumpProfile{0.0, 1.0, 0.5, 0.2});
    Field f2 = constant_field(g, 0.0);
    double k1 = principal_eigenvalue(delta, f1).value;
    double k2 = principal_eigenvalue(delta, f2).value;
    CHECK(k1 > k2);

    Field shifted = f1;
    for (auto& v : shifted.values) v += 0.37;
    double ks = principal_eigenvalue(delta, shifted).value;
    CHECK(ks == doctest::Approx(k1 + 0.37).epsilon(1e-8));
}

TEST_CASE("cooperative eigenvalue on constant coefficients") {
    Grid g = build_grid(21, 1.0);

    // det = 0: largest root of k^2 + 2k + 0 is exactly 0
    ModelCoefficients c = testing::constant_coeffs(g, testing::ConstParams{});
    Field vhat = constant_field(g, 1.0);
    EigenResult r = cooperative_principal_eigenvalue(c, vhat);
    CHECK(std::abs(r.value) <= 1e-8);

    // lambda=1, sigma1 h_u=2, sigma2 vhat=1, mu vhat=1 -> sqrt(2) - 1
    testing::ConstParams p;
    p.sigma1 = 2.0;
    ModelCoefficients c2 = testing::constant_coeffs(g, p);
    EigenResult r2 = cooperative_principal_eigenvalue(c2, vhat);
    CHECK(r2.value == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));
    for (double v : r2.vector) CHECK(v > 0.0);
}

TEST_CASE("cooperative eigenvalue matches the constant-mode formula") {
    Grid g = build_grid(17, 1.0);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (int trial = 0; trial < 8; ++trial) {
        double d1 = u(rng), a1 = u(rng), a2 = u(rng), d2 = u(rng);
        testing::ConstParams p;
        p.lambda = d1;
        p.sigma1 = a1;
        p.sigma2 = a2;
        p.mu = d2;
        ModelCoefficients c = testing::constant_coeffs(g, p);
        Field vhat = constant_field(g, 1.0);
        double want = testing::kappa0_constant(d1, a1, a2, d2);
        EigenResult r = cooperative_principal_eigenvalue(c, vhat);
        CHECK(r.value == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("cooperative eigenvalue matches the dense spectrum") {
    std::mt19937 rng(43);
    for (Grid g : {build_grid(9, 1.0), build_grid(4, 4, 1.0, 1.0)}) {
        ModelCoefficients c = testing::random_heterogeneous_coeffs(g, rng);
        Field vhat = testing::random_bump_field(g, rng);
        EigenResult r = cooperative_principal_eigenvalue(c, vhat, 1e-10);
        double want = oracle::max_real_eigenvalue(oracle::cooperative_dense(c, vhat));
        CHECK(r.value == doctest::Approx(want).epsilon(1e-7));
        for (double v : r.vector) CHECK(v > 0.0);
    }
}

TEST_CASE("power iteration radius") {
    auto ident = [](const std::vector<double>& x, std::vector<double>& y) { y = x; };
    RadiusResult r = spectral_radius_positive(ident, 6);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(r.collapsed);

    auto triple = [](const std::vector<double>& x, std::vector<double>& y) {
        y = x;
        for (auto& v : y) v *= 3.0;
    };
    CHECK(spectral_radius_positive(triple, 6).value == doctest::Approx(3.0).epsilon(1e-10));

    std::mt19937 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd m(10, 10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) m(i, j) = u(rng);
    SparseOperator s = dense_to_sparse(m);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        s.apply(x.data(), y.data());
    };
    RadiusResult rr = spectral_radius_positive(apply, 10, 1e-12);
    CHECK(rr.value == doctest::Approx(oracle::spectral_radius(m)).epsilon(1e-7));
}

TEST_CASE("power iteration flags a collapsing operator") {
    // upper shift matrix is nilpotent: iterates hit exact zero
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
    for (int i = 0; i + 1 < 5; ++i) m(i, i + 1) = 1.0;
    SparseOperator s = dense_to_sparse(m);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        s.apply(x.data(), y.data());
    };
    RadiusResult r = spectral_radius_positive(apply, 5);
    CHECK(r.collapsed);
    CHECK(r.value == 0.0);
}
