#include <random>

#include <benchmark/benchmark.h>

#include "gradiga/analysis.hpp"
#include "gradiga/assembly.hpp"
#include "gradiga/mesh.hpp"
#include "gradiga/solver.hpp"

using namespace gradiga;

namespace {

NonlinearSystem box(int degree, int n, TangentMode mode) {
    return NonlinearSystem(Problem{make_box_patch(3, {0, 0, 0}, {1, 1, 1}, {n, n, n}, degree),
                                   MaterialParams{1.0, 1.0, 0.5}, StrainMeasure::finite, {}, mode, 1});
}

Eigen::VectorXd random_state(std::size_t n) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (auto& v : x) v = u(rng);
    return x;
}

// element residual and tangent; arg 0 = degree, arg 1 = tangent mode
void BM_ElementTangent(benchmark::State& state) {
    const auto mode = state.range(1) == 0 ? TangentMode::pointwise : TangentMode::element;
    const NonlinearSystem sys = box(static_cast<int>(state.range(0)), 1, mode);
    const Eigen::VectorXd u = random_state(sys.num_dofs());
    Eigen::VectorXd r;
    Eigen::MatrixXd k;
    for (auto _ : state) {
        sys.element_system(0, u, 1.0, mode, r, &k);
        benchmark::DoNotOptimize(k.data());
    }
    state.SetLabel(mode == TangentMode::pointwise ? "pointwise" : "element");
}
BENCHMARK(BM_ElementTangent)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ElementResidual(benchmark::State& state) {
    const NonlinearSystem sys = box(static_cast<int>(state.range(0)), 1, TangentMode::pointwise);
    const Eigen::VectorXd u = random_state(sys.num_dofs());
    for (auto _ : state) benchmark::DoNotOptimize(sys.element_residual(0, u).data());
}
BENCHMARK(BM_ElementResidual)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

// global assembly on an n^3 cubic patch
void BM_Assemble(benchmark::State& state) {
    const NonlinearSystem sys = box(3, static_cast<int>(state.range(0)), TangentMode::pointwise);
    const Eigen::VectorXd u = random_state(sys.num_dofs());
    for (auto _ : state) benchmark::DoNotOptimize(sys.assemble(u).jacobian.nonZeros());
    state.counters["dofs"] = static_cast<double>(sys.num_dofs());
}
BENCHMARK(BM_Assemble)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_LinearSolve(benchmark::State& state) {
    const NonlinearSystem sys = box(3, static_cast<int>(state.range(0)), TangentMode::pointwise);
    const Eigen::VectorXd u = random_state(sys.num_dofs());
    const AssemblyResult a = sys.assemble(u);
    LinearSolver solver;
    for (auto _ : state) {
        solver.factorize(a.jacobian);
        benchmark::DoNotOptimize(solver.solve(a.residual).data());
    }
    state.counters["dofs"] = static_cast<double>(sys.num_dofs());
}
BENCHMARK(BM_LinearSolve)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BarSolve(benchmark::State& state) {
    Bar1d bar;
    bar.elements = static_cast<int>(state.range(0));
    bar.measure = StrainMeasure::finite;
    const NonlinearSystem sys(make_bar_1d(bar));
    NewtonConfig cfg;
    cfg.load_steps = 2;
    for (auto _ : state) benchmark::DoNotOptimize(newton_solve(sys, cfg).U.data());
}
BENCHMARK(BM_BarSolve)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
