#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sheetscan/stats.hpp"

namespace {

std::vector<double> random_sample(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = static_cast<double>(rng() % 1000);
    return out;
}

void BM_MannWhitneyNormal(benchmark::State& state) {
    auto x = random_sample(static_cast<std::size_t>(state.range(0)), 1);
    auto y = random_sample(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sheetscan::stats::mann_whitney_normal_p(x, y));
    }
}
BENCHMARK(BM_MannWhitneyNormal)->Arg(100)->Arg(10000);

void BM_MannWhitneyExact(benchmark::State& state) {
    auto x = random_sample(8, 3);
    auto y = random_sample(8, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sheetscan::stats::mann_whitney_exact_p(x, y));
    }
}
BENCHMARK(BM_MannWhitneyExact);

void BM_CliffsDelta(benchmark::State& state) {
    auto x = random_sample(static_cast<std::size_t>(state.range(0)), 5);
    auto y = random_sample(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sheetscan::stats::cliffs_delta(x, y));
    }
}
BENCHMARK(BM_CliffsDelta)->Arg(100)->Arg(10000);

void BM_QuantileSummary(benchmark::State& state) {
    auto x = random_sample(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sheetscan::stats::quantile_summary(x));
    }
}
BENCHMARK(BM_QuantileSummary)->Arg(1000);

}  // namespace
