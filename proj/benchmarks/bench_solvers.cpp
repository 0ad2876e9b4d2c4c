#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "nleq/errors.hpp"
#include "nleq/harness.hpp"
#include "nleq/lsq.hpp"
#include "nleq/minimize.hpp"
#include "nleq/problems.hpp"
#include "nleq/rootfind.hpp"
#include "nleq/spectral.hpp"

namespace {

constexpr nleq::GlobalStrategy kGlobals[] = {
    nleq::GlobalStrategy::cline,  nleq::GlobalStrategy::qline, nleq::GlobalStrategy::gline,
    nleq::GlobalStrategy::pwldog, nleq::GlobalStrategy::dbldog, nleq::GlobalStrategy::hook,
    nleq::GlobalStrategy::none};

void BM_RootDgv(benchmark::State& state) {
    const auto problem = nleq::make_dgv_problem("0121a", false);
    nleq::RootOptions opts;
    opts.method = state.range(0) == 0 ? nleq::RootMethod::newton : nleq::RootMethod::broyden;
    opts.global = kGlobals[state.range(1)];
    const auto& x0 = problem.default_start();
    state.SetLabel(std::string(nleq::to_string(opts.method)) + "/" +
                   std::string(nleq::to_string(opts.global)));
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(nleq::solve_root(problem, x0, opts));
        } catch (const nleq::SingularMatrixError& e) {
            state.SkipWithError(e.what());
            break;
        }
    }
}
BENCHMARK(BM_RootDgv)->ArgsProduct({{0, 1}, {0, 1, 2, 3, 4, 5, 6}})->Unit(benchmark::kMicrosecond);

void BM_RootTrigexp(benchmark::State& state) {
    const auto problem = nleq::make_trigexp_problem(static_cast<std::size_t>(state.range(0)));
    nleq::RootOptions opts;
    opts.method = nleq::RootMethod::newton;
    opts.global = nleq::GlobalStrategy::cline;
    const auto& x0 = problem.default_start();
    for (auto _ : state) benchmark::DoNotOptimize(nleq::solve_root(problem, x0, opts));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RootTrigexp)->RangeMultiplier(2)->Range(25, 200)->Unit(benchmark::kMillisecond);

void BM_LsqDgv(benchmark::State& state) {
    const auto problem = nleq::make_dgv_problem("0121a", state.range(0) != 0);
    const auto& x0 = problem.default_start();
    for (auto _ : state) benchmark::DoNotOptimize(nleq::solve_lsq(problem, x0));
    state.SetLabel(problem.name);
}
BENCHMARK(BM_LsqDgv)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SpectralTrigexp(benchmark::State& state) {
    const auto problem = nleq::make_trigexp_problem(static_cast<std::size_t>(state.range(0)));
    nleq::SpectralOptions opts;
    opts.acceleration = state.range(1) != 0;
    const auto& x0 = problem.default_start();
    for (auto _ : state) benchmark::DoNotOptimize(nleq::solve_spectral(problem, x0, opts));
    state.SetLabel(opts.acceleration ? "accelerated" : "plain");
}
BENCHMARK(BM_SpectralTrigexp)->ArgsProduct({{100, 500}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_MinimizeReducedDgv(benchmark::State& state) {
    const auto problem = nleq::make_dgv_problem("0121a", true);
    nleq::MinimizeOptions opts;
    opts.method = static_cast<nleq::MinimizeMethod>(state.range(0));
    const auto& x0 = problem.default_start();
    const nleq::ScaledObjective objective{problem, std::nullopt};
    for (auto _ : state) benchmark::DoNotOptimize(nleq::minimize(objective, x0, opts));
    state.SetLabel(std::string(nleq::to_string(opts.method)));
}
BENCHMARK(BM_MinimizeReducedDgv)
    ->Arg(static_cast<int>(nleq::MinimizeMethod::vm))
    ->Arg(static_cast<int>(nleq::MinimizeMethod::cg))
    ->Arg(static_cast<int>(nleq::MinimizeMethod::neldermead))
    ->Unit(benchmark::kMillisecond);

void BM_GridDgv(benchmark::State& state) {
    const auto problem = nleq::make_dgv_problem("0121a", false);
    const nleq::NamedStart start{"default", problem.default_start()};
    const std::vector<nleq::RootMethod> methods{nleq::RootMethod::newton, nleq::RootMethod::broyden};
    const std::vector<nleq::GlobalStrategy> globals(std::begin(kGlobals), std::end(kGlobals));
    const bool parallel = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(nleq::run_grid(problem, start, methods, globals, {}, parallel));
    state.SetLabel(parallel ? "parallel" : "sequential");
}
BENCHMARK(BM_GridDgv)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
