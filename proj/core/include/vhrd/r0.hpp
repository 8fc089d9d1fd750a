#pragma once

#include "vhrd/grid.hpp"
#include "vhrd/linalg.hpp"
#include "vhrd/sparse.hpp"

namespace vhrd {

/// The two blocks of the linearization at the infection-free state, acting
/// on stacked (infected host, infected vector) pairs of length 2N:
/// transition = diffusion + recovery/death + cross-transfer, infection =
/// the new-infection coupling. transition has spectral bound < 0.
struct NextGenerationOperators {
    SparseOperator transition;
    SparseOperator infection;
};

NextGenerationOperators assemble_next_generation(const ModelCoefficients& c, const Field& vhat);

/// R0 as the spectral radius of -(infection)(transition)^{-1}. The inverse
/// action exploits the block-triangular structure: solve the vector block
/// first, then the host block; both solves are SPD.
double reproduction_number_direct(const ModelCoefficients& c, const Field& vhat,
                                  double eigen_tol = kDefaultEigenTol,
                                  double linear_tol = kDefaultLinearTol);

/// R0 as the spectral radius of the four-factor cycle
/// (host resolvent)(host gain)(vector resolvent)(vector gain); agrees with
/// the direct route in exact arithmetic.
double reproduction_number_factored(const ModelCoefficients& c, const Field& vhat,
                                    double eigen_tol = kDefaultEigenTol,
                                    double linear_tol = kDefaultLinearTol);

/// Spectral radii of the individual resolvent factors; each is exactly 1.
struct FactorRadii {
    double host = 0.0;     // lambda-weighted host resolvent
    double vector = 0.0;   // mu vhat-weighted vector resolvent
    double combined = 0.0; // their composition
};
FactorRadii factored_radii(const ModelCoefficients& c, const Field& vhat,
                           double eigen_tol = kDefaultEigenTol,
                           double linear_tol = kDefaultLinearTol);

/// Nodewise reproduction number sigma1 h_u sigma2 / (lambda mu).
Field local_reproduction_number(const ModelCoefficients& c);

/// Reference values R0 approaches in the diffusion limits: recovery- and
/// death-weighted averages for large diffusion, the maximum of the local
/// reproduction number for small diffusion.
struct DiffusionLimits {
    double large = 0.0;
    double small = 0.0;
};
DiffusionLimits diffusion_limits(const ModelCoefficients& c);

struct SpectralReport {
    double r0_direct = 0.0;
    double r0_factored = 0.0;
    double kappa0 = 0.0; ///< principal eigenvalue of the cooperative infection block
    Field local_r;
    double local_r_min = 0.0;
    double local_r_max = 0.0;
    double limit_large = 0.0;
    double limit_small = 0.0;
};

SpectralReport spectral_report(const ModelCoefficients& c, const Field& vhat,
                               double eigen_tol = kDefaultEigenTol,
                               double linear_tol = kDefaultLinearTol);

} // namespace vhrd
