#include <benchmark/benchmark.h>

#include "sacfem/assembly.hpp"
#include "sacfem/initial_conditions.hpp"
#include "sacfem/noise.hpp"
#include "sacfem/stepper.hpp"

using namespace sacfem;

namespace {

void BM_AssembleSystem(benchmark::State& state) {
    const Mesh mesh = Mesh::generate_uniform(static_cast<std::size_t>(state.range(0)));
    const NoiseField field;
    AssemblyOptions opts;
    opts.coefficient_quadrature_degree = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_system(mesh, field, opts));
    state.counters["triangles"] = static_cast<double>(mesh.num_triangles());
}
BENCHMARK(BM_AssembleSystem)->Args({64, 4})->Args({64, 8})->Args({256, 4})->Unit(benchmark::kMillisecond);

void BM_NonlinearTerm(benchmark::State& state) {
    const Mesh mesh = Mesh::generate_uniform(static_cast<std::size_t>(state.range(0)));
    const auto u = project_initial_condition(mesh, InitialCondition{}, 0.1);
    Eigen::VectorXd out;
    for (auto _ : state) {
        assemble_nonlinear(mesh, u, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_NonlinearTerm)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Workspace(benchmark::State& state) {
    const Mesh mesh = Mesh::generate_uniform(static_cast<std::size_t>(state.range(0)));
    const auto sys = assemble_system(mesh, NoiseField{});
    SchemeConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(StepWorkspace(mesh, sys, cfg));
}
BENCHMARK(BM_Workspace)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
    const Mesh mesh = Mesh::generate_uniform(static_cast<std::size_t>(state.range(0)));
    SchemeConfig cfg;
    cfg.epsilon = 0.1;
    cfg.delta = 1.0;
    cfg.tau = 1e-3;
    if (state.range(1) == 1) cfg.solver = NewtonSolver{};
    const StepWorkspace ws(mesh, NoiseField{}, cfg);
    const auto u = project_initial_condition(mesh, InitialCondition{}, cfg.epsilon);
    int iterations = 0;
    for (auto _ : state) {
        auto r = step(u, 0.01, ws);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.u.data());
    }
    state.counters["iterations"] = iterations;
    state.SetLabel(state.range(1) == 1 ? "newton" : "fixed_point");
}
BENCHMARK(BM_Step)->Args({64, 0})->Args({64, 1})->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

void BM_BrownianPath(benchmark::State& state) {
    std::uint64_t id = 0;
    for (auto _ : state) {
        const auto p = generate_path(1.0, 1e-4, 20170101, id++);
        benchmark::DoNotOptimize(macro_increments(p, 0.001).dW.data());
    }
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_BrownianPath)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
