#pragma once

#include <map>
#include <string>
#include <vector>

#include "sheetscan/function_catalog.hpp"
#include "sheetscan/workbook.hpp"

namespace sheetscan {

// How c4 counts inter-worksheet connections. The default counts distinct
// ordered (source sheet, target sheet) pairs; the alternatives count
// referencing formula cells or reference occurrences.
enum class C4Mode { pairs, cells, occurrences };

std::string_view c4_mode_name(C4Mode mode);
C4Mode c4_mode_from_name(std::string_view name);

struct MetricOptions {
    C4Mode c4_mode = C4Mode::pairs;
    bool exclude_passing = true;  // c6/c7/f3 drop passing formulas
};

// All measured facts about one workbook. Lists are ordered by worksheet,
// then row-major; per-unique-formula lists are ordered by
// (sheet index, R1C1 key).
struct MetricRecord {
    std::string source_id;

    long long s1 = 0;  // non-empty cells
    long long s2 = 0;  // non-empty worksheets
    long long s3 = 0;  // formula cells
    long long s4 = 0;  // unique formulas (parseable)
    std::vector<long long> s5;  // formula lengths in characters

    bool has_external_link = false;  // c1 numerator
    long long c2 = 0;                // distinct external workbook tokens
    bool has_interworksheet = false;  // c3 numerator
    long long c4 = 0;                 // per MetricOptions::c4_mode

    long long passing_count = 0;  // c5 numerator
    long long formula_count = 0;  // equals s3

    std::vector<long long> c6;  // path depths (filtered)
    std::vector<long long> c7;  // transitive precedent counts (filtered)

    std::map<std::string, long long> f1;  // function occurrences
    // Per unique formula: sorted category names / sorted function names.
    std::vector<std::vector<std::string>> f2;
    std::vector<std::vector<std::string>> f1_by_formula;

    std::vector<long long> f3;  // direct precedent counts (filtered)
    std::vector<long long> f4;  // parse tree depths
    std::vector<long long> f5;  // unique function counts

    struct Diagnostics {
        long long unparseable = 0;
        long long cycle_excluded = 0;  // non-passing cells dropped from c6/c7
        long long unresolved_refs = 0;

        bool operator==(const Diagnostics&) const = default;
    } diagnostics;

    bool operator==(const MetricRecord&) const = default;
};

MetricRecord compute_record(const Workbook& wb,
                            const FunctionCatalog& catalog,
                            const MetricOptions& options = {});

struct CorpusPercentages {
    double c1 = 0;  // share of workbooks with an external link
    double c3 = 0;  // share of workbooks with inter-worksheet links
    double c5 = 0;  // passing formulas / total formulas
    bool c5_degenerate = false;  // 0/0 reported as 0
    // Auxiliary reading of c5 against total non-empty cells.
    double c5_of_cells = 0;
    bool c5_of_cells_degenerate = false;
};

// Empty input is an invalid_argument.
CorpusPercentages corpus_percentages(const std::vector<MetricRecord>& records);

// One record per JSONL line, schema version "v":1.
std::string record_to_json_line(const MetricRecord& record);

// line_no is used in SchemaError messages (1-based).
MetricRecord record_from_json_line(std::string_view line,
                                   std::size_t line_no);

std::vector<MetricRecord> read_records_file(const std::string& path);

}  // namespace sheetscan
