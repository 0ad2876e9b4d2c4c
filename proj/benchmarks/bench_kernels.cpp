#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>

#include "nleq/numlinalg.hpp"
#include "nleq/problems.hpp"

namespace {

// Deterministic, well-conditioned but non-trivial test matrix.
nleq::DenseMatrix test_matrix(std::size_t rows, std::size_t cols) {
    nleq::DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            a(i, j) = std::sin(0.37 * static_cast<double>(i + 1) * static_cast<double>(j + 2)) +
                      (i == j ? 2.0 : 0.0);
    return a;
}

nleq::Vector test_vector(std::size_t n) {
    nleq::Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::cos(0.11 * static_cast<double>(i));
    return v;
}

void BM_SolveLinear(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = test_matrix(n, n);
    const auto b = test_vector(n);
    for (auto _ : state) benchmark::DoNotOptimize(nleq::solve_linear(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLinear)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_SolveLeastSquares(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = test_matrix(2 * n, n);
    const auto b = test_vector(2 * n);
    for (auto _ : state) benchmark::DoNotOptimize(nleq::solve_least_squares(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLeastSquares)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_SingularValues(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = test_matrix(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(nleq::singular_values(a));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SingularValues)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_TruncatedLeastSquaresTall(benchmark::State& state) {
    const auto p = static_cast<std::size_t>(state.range(0));
    const auto a = test_matrix(500, p);
    const auto b = test_vector(500);
    for (auto _ : state) benchmark::DoNotOptimize(nleq::solve_truncated_least_squares(a, b, 1e-12));
}
BENCHMARK(BM_TruncatedLeastSquaresTall)->Arg(5)->Arg(10)->Arg(25);

void BM_FdJacobian(benchmark::State& state) {
    const auto kind = static_cast<nleq::DiffScheme>(state.range(0));
    const auto problem = nleq::make_trigexp_problem(static_cast<std::size_t>(state.range(1)));
    const auto f = problem.bound();
    const auto& x = problem.default_start();
    const auto fx = f(x);
    const auto scheme = nleq::JacobianScheme::of(kind);
    for (auto _ : state) benchmark::DoNotOptimize(nleq::fd_jacobian(f, x, scheme, &fx));
    state.SetLabel(std::string(nleq::to_string(kind)));
}
BENCHMARK(BM_FdJacobian)
    ->ArgsProduct({{static_cast<int>(nleq::DiffScheme::forward),
                    static_cast<int>(nleq::DiffScheme::central)},
                   {50, 200}});

void BM_DgvResidual(benchmark::State& state) {
    const auto problem = nleq::make_dgv_problem("0121a", state.range(0) != 0);
    const auto& x = problem.default_start();
    for (auto _ : state) benchmark::DoNotOptimize(problem.evaluate(x));
    state.SetLabel(problem.name);
}
BENCHMARK(BM_DgvResidual)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
