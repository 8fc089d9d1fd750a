#include <benchmark/benchmark.h>

#include "vhrd/dynamics.hpp"
#include "vhrd/equilibria.hpp"
#include "vhrd/linalg.hpp"
#include "vhrd/r0.hpp"

namespace {

using namespace vhrd;

ModelCoefficients desk_coeffs(const Grid& g) {
    ModelCoefficients c{
        constant_field(g, 1.0),  constant_field(g, 0.5),
        constant_field(g, 1.0),  field_from_profile(g, BumpProfile{1.0, 0.3, 0.3, 0.2}),
        field_from_profile(g, BumpProfile{0.8, 0.5, 0.6, 0.25}),
        constant_field(g, 0.5),  constant_field(g, 1.0),
        constant_field(g, 4.0),
    };
    return c;
}

void BM_AssembleDiffusion1D(benchmark::State& state) {
    Grid g = build_grid(static_cast<int>(state.range(0)), 1.0);
    Field delta = field_from_profile(g, RampProfile{0.5, 2.0});
    for (auto _ : state) benchmark::DoNotOptimize(assemble_diffusion(delta));
}
BENCHMARK(BM_AssembleDiffusion1D)->Arg(101)->Arg(1001);

void BM_AssembleDiffusion2D(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Grid g = build_grid(n, n, 1.0, 1.0);
    Field delta = field_from_profile(g, BumpProfile{0.5, 1.0, 0.4, 0.3});
    for (auto _ : state) benchmark::DoNotOptimize(assemble_diffusion(delta));
}
BENCHMARK(BM_AssembleDiffusion2D)->Arg(33)->Arg(101);

void BM_OperatorApply(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Grid g = build_grid(n, n, 1.0, 1.0);
    SparseOperator a = assemble_diffusion(field_from_profile(g, BumpProfile{0.5, 1.0, 0.4, 0.3}));
    std::vector<double> x(static_cast<std::size_t>(g.size()), 1.0), y(x);
    for (auto _ : state) {
        a.apply(x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_OperatorApply)->Arg(33)->Arg(101);

void BM_SolveLinear(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    Grid g = build_grid(n, n, 1.0, 1.0);
    SparseOperator l = assemble_diffusion(constant_field(g, 1.0));
    SparseOperator a = diag_minus(constant_field(g, 1.0).values, l);
    std::vector<double> b(static_cast<std::size_t>(g.size()), 1.0);
    for (int i = 0; i < g.size(); ++i) b[static_cast<std::size_t>(i)] += 0.3 * g.x(i);
    for (auto _ : state) benchmark::DoNotOptimize(solve_linear(a, b, 1e-11));
}
BENCHMARK(BM_SolveLinear)->Arg(33)->Arg(101);

void BM_PrincipalEigenvalue(benchmark::State& state) {
    Grid g = build_grid(static_cast<int>(state.range(0)), 1.0);
    Field delta = constant_field(g, 1.0);
    Field f = field_from_profile(g, BumpProfile{-0.5, 1.0, 0.5, 0.2});
    for (auto _ : state) benchmark::DoNotOptimize(principal_eigenvalue(delta, f, 1e-9));
}
BENCHMARK(BM_PrincipalEigenvalue)->Arg(101)->Arg(401);

void BM_ReproductionNumber(benchmark::State& state) {
    Grid g = build_grid(static_cast<int>(state.range(0)), 1.0);
    ModelCoefficients c = desk_coeffs(g);
    Field vhat = compute_vhat(c);
    for (auto _ : state) benchmark::DoNotOptimize(reproduction_number_direct(c, vhat));
}
BENCHMARK(BM_ReproductionNumber)->Arg(101)->Arg(401);

void BM_ComputeVhat(benchmark::State& state) {
    Grid g = build_grid(static_cast<int>(state.range(0)), 1.0);
    ModelCoefficients c = desk_coeffs(g);
    for (auto _ : state) benchmark::DoNotOptimize(compute_vhat(c));
}
BENCHMARK(BM_ComputeVhat)->Arg(101)->Arg(401);

void BM_StepFull(benchmark::State& state) {
    Grid g = build_grid(static_cast<int>(state.range(0)), 1.0);
    ModelCoefficients c = desk_coeffs(g);
    // loose tolerance: the fine grid pushes the Newton residual floor above
    // the default, and the step cost does not depend on vhat accuracy
    Field vhat = compute_vhat(c, 1e-8, 1e-9);
    double dt = max_stable_dt(c, boundedness_bound(c, vhat));
    SimState s{field_from_profile(g, BumpProfile{0.2, 0.2, 0.3, 0.2}), vhat,
               constant_field(g, 0.05), 0.0};
    for (auto _ : state) {
        s = step_full(s, c, dt);
        benchmark::DoNotOptimize(s.h_i.values.data());
    }
}
BENCHMARK(BM_StepFull)->Arg(201)->Arg(1001);

} // namespace

BENCHMARK_MAIN();
