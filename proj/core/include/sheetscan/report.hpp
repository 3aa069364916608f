#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sheetscan/function_catalog.hpp"
#include "sheetscan/metrics.hpp"
#include "sheetscan/stats.hpp"

namespace sheetscan {

struct SummaryRow {
    std::string id;      // "s1", "c6", ...
    std::string label;
    std::size_t n = 0;
    stats::FiveNumber five;
};

struct CorpusSummary {
    std::string corpus_name;
    std::size_t workbook_count = 0;
    long long formula_cells = 0;
    long long unique_formulas = 0;
    long long passing_formulas = 0;
    long long unparseable = 0;
    long long cycle_excluded = 0;
    long long unresolved_refs = 0;

    std::vector<SummaryRow> size_rows;      // s1..s4 per workbook, s5 pooled
    std::vector<SummaryRow> coupling_rows;  // c2*, c4* filtered; c6, c7 pooled
    std::vector<SummaryRow> formula_rows;   // f3, f4, f5 pooled
    CorpusPercentages percentages;

    TopFunctions top;  // top 15 built-ins over unique formulas
    std::vector<std::pair<std::string, double>> category_shares;  // sorted
};

// Throws invalid_argument on an empty record set.
CorpusSummary summarize_records(const std::vector<MetricRecord>& records,
                                const FunctionCatalog& catalog,
                                const std::string& corpus_name = "corpus");

std::string render_summary_text(const CorpusSummary& summary);
std::string render_summary_json(const CorpusSummary& summary);

struct ComparisonRow {
    std::string id;
    std::string label;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    bool computed = false;  // false when a side has no sample
    double p = 1;
    std::string band;       // "<0.01", "<0.05", ">0.05"
    std::string method;     // "exact" | "normal"
    bool d_shown = false;   // Table-style blank when p > 0.05
    double d = 0;
    std::string effect;
};

struct ComparisonReport {
    std::string name_a;
    std::string name_b;
    std::size_t workbooks_a = 0;
    std::size_t workbooks_b = 0;
    std::vector<ComparisonRow> rows;
    CorpusPercentages pct_a;
    CorpusPercentages pct_b;
};

ComparisonReport compare_records(
    const std::vector<MetricRecord>& a, const std::vector<MetricRecord>& b,
    int exact_cap = stats::kDefaultExactCap,
    const std::string& name_a = "A", const std::string& name_b = "B");

std::string render_comparison_text(const ComparisonReport& report);
std::string render_comparison_json(const ComparisonReport& report);

// Top-n function table for the `functions` subcommand.
std::string render_functions_text(const std::vector<MetricRecord>& records,
                                  const FunctionCatalog& catalog, int n);
std::string render_functions_json(const std::vector<MetricRecord>& records,
                                  const FunctionCatalog& catalog, int n);

// "3,672.0"-style fixed one-decimal with thousands separators.
std::string format_fixed1(double value);
// "71.4%"
std::string format_pct1(double fraction);

}  // namespace sheetscan
