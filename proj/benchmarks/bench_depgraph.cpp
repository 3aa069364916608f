#include <benchmark/benchmark.h>

#include "sheetscan/depgraph.hpp"

namespace {

// A workbook with one value column and `chains` formula columns that each
// feed the next, giving long dependency chains.
sheetscan::Workbook chained_workbook(int rows, int chains) {
    sheetscan::Workbook wb;
    wb.source_id = "bench";
    sheetscan::Worksheet ws;
    ws.name = "S";
    for (int r = 1; r <= rows; ++r) {
        sheetscan::Cell value;
        value.value = static_cast<double>(r);
        ws.cells[{r, 1}] = value;
        for (int c = 2; c <= chains + 1; ++c) {
            sheetscan::Cell formula;
            formula.formula = sheetscan::col_to_letters(c - 1) +
                              std::to_string(r) + "+1";
            ws.cells[{r, c}] = formula;
        }
    }
    wb.worksheets.push_back(std::move(ws));
    return wb;
}

void BM_BuildGraph(benchmark::State& state) {
    auto wb = chained_workbook(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) {
        auto g = sheetscan::PrecedentGraph::build(wb);
        benchmark::DoNotOptimize(g.cycle_cell_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 8);
}
BENCHMARK(BM_BuildGraph)->Arg(64)->Arg(256)->Arg(1024);

void BM_DirectPrecedentsWideRange(benchmark::State& state) {
    sheetscan::Workbook wb;
    sheetscan::Worksheet ws;
    ws.name = "S";
    wb.worksheets.push_back(ws);
    auto tree = sheetscan::parse_formula(
        "VLOOKUP(B51,[50]jan98!$A$34:$IV$84,3,0)");
    for (auto _ : state) {
        auto direct =
            sheetscan::direct_precedents(tree, {0, 2, 4}, wb);
        benchmark::DoNotOptimize(direct.unique_cell_count);
    }
}
BENCHMARK(BM_DirectPrecedentsWideRange);

}  // namespace
