/// Microbenchmarks for the hot paths: Choquet integrals (adaptive quadrature
/// vs exact atomic sums), one objective evaluation, and a full solve of the
/// three-agent gamma market.

#include "riskshare/choquet.hpp"
#include "riskshare/distortion.hpp"
#include "riskshare/distribution.hpp"
#include "riskshare/solver.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace riskshare;

RiskDistribution gamma_law() { return RiskDistribution::gamma(2.0, 10.0); }

RiskDistribution atomic_law(int atoms) {
    std::vector<double> xs, ps;
    for (int k = 0; k < atoms; ++k) {
        xs.push_back(1.5 * k);
        ps.push_back(1.0 / atoms);
    }
    return RiskDistribution::discrete(xs, ps);
}

MinMaxProblem gamma_market() {
    auto cap = DistortionFunction::expected_shortfall(0.025);
    std::vector<DistortionSet> sets = {
        DistortionSet({DistortionFunction::expected_shortfall(0.01)}, "a"),
        DistortionSet({cap, DistortionFunction::power_tail(0.05, 0.3)}, "b"),
        DistortionSet({cap, DistortionFunction::wang(2.8)}, "c"),
    };
    return MinMaxProblem(gamma_law(), std::move(sets));
}

void bm_choquet_gamma(benchmark::State& state) {
    auto S = gamma_law();
    auto T = DistortionFunction::expected_shortfall(0.025);
    for (auto _ : state) benchmark::DoNotOptimize(choquet_integral(S, T));
}
BENCHMARK(bm_choquet_gamma);

void bm_choquet_atomic(benchmark::State& state) {
    auto S = atomic_law(static_cast<int>(state.range(0)));
    auto T = DistortionFunction::wang(1.5);
    for (auto _ : state) benchmark::DoNotOptimize(choquet_integral(S, T));
}
BENCHMARK(bm_choquet_atomic)->Arg(8)->Arg(64)->Arg(512);

void bm_objective_gamma(benchmark::State& state) {
    auto problem = gamma_market();
    std::vector<std::vector<double>> weights = {{1.0}, {0.5, 0.5}, {0.25, 0.75}};
    for (auto _ : state) benchmark::DoNotOptimize(objective(problem, weights));
}
BENCHMARK(bm_objective_gamma);

void bm_solve_gamma_market(benchmark::State& state) {
    auto problem = gamma_market();
    for (auto _ : state) benchmark::DoNotOptimize(solve(problem).value);
}
BENCHMARK(bm_solve_gamma_market)->Unit(benchmark::kMillisecond);

void bm_solve_atomic_market(benchmark::State& state) {
    auto cap = DistortionFunction::expected_shortfall(0.25);
    std::vector<DistortionSet> sets = {
        DistortionSet({cap, DistortionFunction::identity()}, "a"),
        DistortionSet({DistortionFunction::power_tail(0.4, 0.5),
                       DistortionFunction::wang(1.2)},
                      "b"),
    };
    MinMaxProblem problem(atomic_law(static_cast<int>(state.range(0))), std::move(sets));
    for (auto _ : state) benchmark::DoNotOptimize(solve(problem).value);
}
BENCHMARK(bm_solve_atomic_market)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
