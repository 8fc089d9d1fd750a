#pragma once

#include <string>
#include <variant>
#include <vector>

#include "vhrd/sparse.hpp"

namespace vhrd {

/// Uniform tensor grid on an interval (dim 1) or a rectangle (dim 2) with
/// zero-flux boundaries. Nodes sit on the closed domain including the
/// boundary; 2D nodes are numbered row-major, index = j*nx + i.
struct Grid {
    int dim = 1;
    int nx = 0;
    int ny = 1;
    double lx = 0.0;
    double ly = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    int size() const { return nx * ny; }
    int index(int i, int j = 0) const { return j * nx + i; }
    double x(int idx) const { return hx * (idx % nx); }
    double y(int idx) const { return dim == 2 ? hy * (idx / nx) : 0.0; }

    bool operator==(const Grid&) const = default;
};

Grid build_grid(int n, double length);
Grid build_grid(int nx, int ny, double lx, double ly);

/// Nodewise scalar field attached to a grid.
struct Field {
    Grid grid;
    std::vector<double> values;

    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(values.size()); }
};

Field constant_field(const Grid& g, double value);
double field_min(const Field& f);
double field_max(const Field& f);
double sup_norm(const Field& f);
double sup_distance(const Field& a, const Field& b);

struct ConstantProfile {
    double value = 0.0;
};
struct NodesProfile {
    std::vector<double> values;
};
/// Linear in x from `from` at x=0 to `to` at x=lx.
struct RampProfile {
    double from = 0.0;
    double to = 0.0;
};
/// base + amplitude * exp(-((x-center)/width)^2); varies along x only.
struct BumpProfile {
    double base = 0.0;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
};

using Profile = std::variant<ConstantProfile, NodesProfile, RampProfile, BumpProfile>;

Field field_from_profile(const Grid& g, const Profile& p);

/// The eight model coefficients, all nodewise fields on one grid:
/// host/vector diffusion, host recovery, vector birth and death, the two
/// transmission rates, and the (static) uninfected-host density.
struct ModelCoefficients {
    Field delta1; ///< diffusion of infected hosts
    Field delta2; ///< diffusion of vectors
    Field lambda; ///< host recovery rate
    Field beta;   ///< vector birth rate
    Field sigma1; ///< vector-to-host transmission
    Field sigma2; ///< host-to-vector transmission
    Field mu;     ///< density-dependent vector death rate
    Field h_u;    ///< uninfected host density
};

/// Checks grids agree and every coefficient is strictly positive at every
/// node; the message names the offending coefficient.
void validate_coefficients(const ModelCoefficients& c);

/// Flux-form discretization of div(delta grad .) with zero-flux boundaries:
/// one conductance per interior face, arithmetic mean of the nodal delta.
/// Rows sum to zero and the matrix is symmetric.
SparseOperator assemble_diffusion(const Field& delta);

/// Trapezoidal quadrature of weight*field over the domain.
double integrate_field(const Field& f, const Field& weight);
double integrate_field(const Field& f);

} // namespace vhrd
