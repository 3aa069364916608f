#include <benchmark/benchmark.h>

#include "sheetscan/formula.hpp"

namespace {

const char* kFormulas[] = {
    "D9+E9",
    "VLOOKUP(B51,[50]jan98!$A$34:$IV$84,3,0)",
    "(B5-T5)/(B6*SQRT(4))",
    "IF(SUM(A1:A200)>0,AVERAGE(B1:B200),ROUND(C1,2))",
    "A1&\" \"&B1&\" \"&C1",
};

void BM_ParseFormula(benchmark::State& state) {
    const char* text = kFormulas[state.range(0)];
    for (auto _ : state) {
        auto tree = sheetscan::parse_formula(text);
        benchmark::DoNotOptimize(tree);
    }
}
BENCHMARK(BM_ParseFormula)->DenseRange(0, 4);

void BM_RelativeR1C1(benchmark::State& state) {
    auto tree =
        sheetscan::parse_formula("VLOOKUP(B51,[50]jan98!$A$34:$IV$84,3,0)");
    for (auto _ : state) {
        auto key = sheetscan::to_relative_r1c1(tree, {51, 4});
        benchmark::DoNotOptimize(key);
    }
}
BENCHMARK(BM_RelativeR1C1);

void BM_ParseTreeDepth(benchmark::State& state) {
    // long flat additions, the shape behind deep real-world trees
    std::string text = "1";
    for (int i = 0; i < 104; ++i) text += "+1";
    auto tree = sheetscan::parse_formula(text);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sheetscan::parse_tree_depth(tree));
    }
}
BENCHMARK(BM_ParseTreeDepth);

}  // namespace
