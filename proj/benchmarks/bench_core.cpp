#include "delaylab/connectivity.hpp"
#include "delaylab/dynamics.hpp"
#include "delaylab/evolution.hpp"
#include "delaylab/metrics.hpp"
#include "delaylab/reduction.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace delaylab;

namespace {

Matrix complete(int n) {
    Matrix a = Matrix::Ones(n, n);
    a.diagonal().setZero();
    return a;
}

Matrix spread_state(int n) {
    Matrix x(n, 1);
    for (int i = 0; i < n; ++i) x(i, 0) = i;
    return x;
}

std::vector<Interval> doubling(int last) {
    std::vector<Interval> on;
    for (int p = 0; p <= last; ++p) on.push_back({std::ldexp(1.0, p), std::ldexp(1.0, p) + 1.0});
    return on;
}

void BM_SimulateComplete(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto w = WeightSchedule::constant(complete(n), 20.0);
    const auto d = DelaySchedule::uniform(n, 1.0);
    const auto init = InitialCondition::constant_history(0.0, spread_state(n), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_continuous(w, d, init, std::nullopt, 20.0, 0.25));
}
BENCHMARK(BM_SimulateComplete)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_SimulateRk4(benchmark::State& state) {
    // Irrational delay forces the fourth-order fallback.
    const int n = static_cast<int>(state.range(0));
    const auto w = WeightSchedule::constant(complete(n), 10.0);
    const auto d = DelaySchedule::uniform(n, std::sqrt(2.0));
    const auto init = InitialCondition::constant_history(0.0, spread_state(n), std::sqrt(2.0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_continuous(w, d, init, std::nullopt, 10.0, 0.05));
}
BENCHMARK(BM_SimulateRk4)->Arg(4)->Arg(16);

void BM_AqscSearch(benchmark::State& state) {
    const int last = static_cast<int>(state.range(0));
    Matrix chain = Matrix::Zero(6, 6);
    for (int k = 0; k + 1 < 6; ++k) chain(k + 1, k) = 4.0;
    const auto w = make_intermittent(chain, doubling(last));
    for (auto _ : state) benchmark::DoNotOptimize(find_aqsc_sequence(w, 1.0));
}
BENCHMARK(BM_AqscSearch)->Arg(6)->Arg(10)->Arg(14);

void BM_EvolutionaryMatrix(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto w = WeightSchedule::constant(complete(n), 10.0);
    const auto d = DelaySchedule::uniform(n, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(compute_evolutionary(w, d, 0.0, 10.0, 0.25));
}
BENCHMARK(BM_EvolutionaryMatrix)->Arg(4)->Arg(16);

void BM_WindowExtrema(benchmark::State& state) {
    const int n = 8;
    const auto w = WeightSchedule::constant(complete(n), 200.0);
    const auto d = DelaySchedule::uniform(n, 2.0);
    const auto init = InitialCondition::constant_history(0.0, spread_state(n), 2.0);
    const auto traj = simulate_continuous(w, d, init, std::nullopt, 200.0, 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(window_extrema(traj, 2.0));
}
BENCHMARK(BM_WindowExtrema);

void BM_VerifyReduction(benchmark::State& state) {
    const int n = 5, steps = 50;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<Matrix> b;
    for (int k = 0; k < steps; ++k) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = u(rng);
        for (int i = 0; i < n; ++i) m.row(i) /= m.row(i).sum();
        b.push_back(m);
    }
    const auto w = WeightSchedule::discrete(std::move(b));
    const auto d = DelaySchedule::uniform(n, 2.0);
    const std::vector<Matrix> window(3, spread_state(n));
    for (auto _ : state) benchmark::DoNotOptimize(verify_reduction(w, d, window, steps));
}
BENCHMARK(BM_VerifyReduction);

}  // namespace
BENCHMARK_MAIN();
