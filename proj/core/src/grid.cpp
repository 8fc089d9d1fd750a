#include "vhrd/grid.hpp"

#include <algorithm>
#include <cmath>

#include "vhrd/errors.hpp"

namespace vhrd {

Grid build_grid(int n, double length) {
    if (n < 3) throw ConfigError("grid: need at least 3 nodes per axis, got " + std::to_string(n));
    if (!(length > 0.0)) throw ConfigError("grid: length must be positive");
    Grid g;
    g.dim = 1;
    g.nx = n;
    g.ny = 1;
    g.lx = length;
    g.ly = 0.0;
    g.hx = length / (n - 1);
    g.hy = 0.0;
    return g;
}

Grid build_grid(int nx, int ny, double lx, double ly) {
    if (nx < 3 || ny < 3)
        throw ConfigError("grid: need at least 3 nodes per axis, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("grid: lengths must be positive");
    Grid g;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    g.hx = lx / (nx - 1);
    g.hy = ly / (ny - 1);
    return g;
}

Field constant_field(const Grid& g, double value) {
    return Field{g, std::vector<double>(static_cast<std::size_t>(g.size()), value)};
}

double field_min(const Field& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

double field_max(const Field& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double sup_distance(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("sup_distance: fields on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

Field field_from_profile(const Grid& g, const Profile& p) {
    Field f = constant_field(g, 0.0);
    if (const auto* c = std::get_if<ConstantProfile>(&p)) {
        for (auto& v : f.values) v = c->value;
    } else if (const auto* nd = std::get_if<NodesProfile>(&p)) {
        if (static_cast<int>(nd->values.size()) != g.size())
            throw ConfigError("profile: nodes list has " + std::to_string(nd->values.size()) +
                              " entries, grid has " + std::to_string(g.size()) + " nodes");
        f.values = nd->values;
    } else if (const auto* r = std::get_if<RampProfile>(&p)) {
        for (int i = 0; i < g.size(); ++i)
            f[i] = r->from + (r->to - r->from) * (g.x(i) / g.lx);
    } else if (const auto* b = std::get_if<BumpProfile>(&p)) {
        if (!(b->width > 0.0)) throw ConfigError("profile: bump width must be positive");
        for (int i = 0; i < g.size(); ++i) {
            double s = (g.x(i) - b->center) / b->width;
            f[i] = b->base + b->amplitude * std::exp(-s * s);
        }
    }
    return f;
}

void validate_coefficients(const ModelCoefficients& c) {
    const Grid& g = c.delta1.grid;
    auto check = [&](const Field& f, const char* name) {
        if (!(f.grid == g))
            throw ConfigError(std::string("coefficient '") + name + "': grid mismatch");
        if (f.size() != g.size())
            throw ConfigError(std::string("coefficient '") + name + "': wrong length");
        for (double v : f.values)
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError(std::string("coefficient '") + name +
                                  "': must be strictly positive at every node");
    };
    check(c.delta1, "delta1");
    check(c.delta2, "delta2");
    check(c.lambda, "lambda");
    check(c.beta, "beta");
    check(c.sigma1, "sigma1");
    check(c.sigma2, "sigma2");
    check(c.mu, "mu");
    check(c.h_u, "h_u");
}

SparseOperator assemble_diffusion(const Field& delta) {
    const Grid& g = delta.grid;
    for (double v : delta.values)
        if (!(v > 0.0)) throw ConfigError("assemble_diffusion: delta must be strictly positive");

    // Row-wise gather: each node accumulates the conductances of its faces.
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(g.size()) * 5);
    double ihx2 = 1.0 / (g.hx * g.hx);
    double ihy2 = g.dim == 2 ? 1.0 / (g.hy * g.hy) : 0.0;

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int row = g.index(i, j);
            double diag = 0.0;
            auto couple = [&](int ni, int nj, double ih2) {
                int col = g.index(ni, nj);
                double cond = 0.5 * (delta[row] + delta[col]) * ih2;
                trip.push_back({row, col, cond});
                diag -= cond;
            };
            if (i > 0) couple(i - 1, j, ihx2);
            if (i < g.nx - 1) couple(i + 1, j, ihx2);
            if (g.dim == 2 && j > 0) couple(i, j - 1, ihy2);
            if (g.dim == 2 && j < g.ny - 1) couple(i, j + 1, ihy2);
            trip.push_back({row, row, diag});
        }
    }
    return SparseOperator::from_triplets(g.size(), std::move(trip));
}

double integrate_field(const Field& f, const Field& weight) {
    if (!(f.grid == weight.grid))
        throw std::invalid_argument("integrate_field: fields on different grids");
    const Grid& g = f.grid;
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        double wy = g.dim == 2 ? ((j == 0 || j == g.ny - 1) ? 0.5 * g.hy : g.hy) : 1.0;
        for (int i = 0; i < g.nx; ++i) {
            double wx = (i == 0 || i == g.nx - 1) ? 0.5 * g.hx : g.hx;
            int idx = g.index(i, j);
            acc += wx * wy * f[idx] * weight[idx];
        }
    }
    return acc;
}

double integrate_field(const Field& f) {
    return integrate_field(f, constant_field(f.grid, 1.0));
}

} // namespace vhrd
