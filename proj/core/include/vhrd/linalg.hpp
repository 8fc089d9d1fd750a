#pragma once

#include <functional>
#include <vector>

#include "vhrd/grid.hpp"
#include "vhrd/sparse.hpp"

namespace vhrd {

inline constexpr double kDefaultLinearTol = 1e-11;
inline constexpr double kDefaultEigenTol = 1e-9;

/// y = A(x); callers reuse the output buffer across iterations.
using LinearAction = std::function<void(const std::vector<double>&, std::vector<double>&)>;

/// Conjugate gradients for symmetric positive definite systems. Stops when
/// ||Ax-b||_2 <= tol*||b||_2. max_iter == 0 means 10*n. Throws SolverError
/// on stagnation or when the cap is hit. x0, when given, seeds the iteration.
std::vector<double> solve_linear(const SparseOperator& a, const std::vector<double>& b,
                                 double tol = kDefaultLinearTol, int max_iter = 0,
                                 const std::vector<double>* x0 = nullptr);

/// Matrix-free variant used by the steppers and eigen solvers.
std::vector<double> solve_linear_action(const LinearAction& apply, int n,
                                        const std::vector<double>& b, double tol,
                                        int max_iter = 0, const std::vector<double>* x0 = nullptr);

struct EigenResult {
    double value = 0.0;
    std::vector<double> vector; ///< sup-normalized, strictly positive
    double residual = 0.0;      ///< ||A v - value v||_inf at return
    int iterations = 0;
};

/// Principal (largest) eigenvalue of div(delta grad .) + f under zero-flux
/// boundaries. Inverse power iteration on the shifted resolvent
/// (s - A)^{-1} with s = max f + 1; the shifted matrix is an irreducible
/// M-matrix, so iterates stay positive and the limit is the Perron pair.
/// Stops when the operator residual drops below tol.
EigenResult principal_eigenvalue(const Field& delta, const Field& f,
                                 double tol = kDefaultEigenTol, int max_iter = 0,
                                 const std::vector<double>* v0 = nullptr);

/// Principal eigenvalue of the coupled infection block
///   [ div(d1 grad) - lambda        sigma1 h_u          ]
///   [ sigma2 vhat                  div(d2 grad) - mu vhat ]
/// acting on stacked (host, vector) pairs of length 2N. Same resolvent
/// scheme; the inner solve is block Gauss-Seidel with CG per block.
EigenResult cooperative_principal_eigenvalue(const ModelCoefficients& c, const Field& vhat,
                                             double tol = kDefaultEigenTol, int max_iter = 0);

struct RadiusResult {
    double value = 0.0;
    bool collapsed = false; ///< iterate hit the zero vector; radius reported as 0
    int iterations = 0;
};

/// Power iteration for a positivity-preserving operator, started from the
/// all-ones vector. Stops when successive Rayleigh-style estimates differ
/// by less than tol. check_positive makes a negative iterate entry an error
/// (a negative entry means the operator was assembled wrong).
RadiusResult spectral_radius_positive(const LinearAction& apply, int n,
                                      double tol = kDefaultEigenTol, int max_iter = 20000,
                                      bool check_positive = false);

} // namespace vhrd
