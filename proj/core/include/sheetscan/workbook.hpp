#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetscan/cellref.hpp"

namespace sheetscan {

// Error values a cell may hold ("#REF!", "#DIV/0!", ...). Workbooks with
// broken results must still load, so these are ordinary values.
struct ErrorValue {
    std::string code;

    bool operator==(const ErrorValue&) const = default;
};

// True for the closed set of codes the canonical format accepts.
bool is_known_error_code(std::string_view code);

using CellValue = std::variant<double, std::string, bool, ErrorValue>;

// A stored cell: at least one of value/formula is present. Formula text
// is stored without the leading '='.
struct Cell {
    std::optional<CellValue> value;
    std::optional<std::string> formula;

    bool operator==(const Cell&) const = default;
};

struct Worksheet {
    std::string name;
    std::map<RowCol, Cell> cells;            // sparse, row-major order
    std::vector<CellRange> merged_regions;   // sorted, non-overlapping

    bool empty() const { return cells.empty(); }

    // The merged region containing rc, if any.
    const CellRange* merged_region_at(RowCol rc) const;

    bool operator==(const Worksheet&) const = default;
};

struct Workbook {
    std::string source_id;
    std::vector<Worksheet> worksheets;

    // Case-insensitive sheet lookup; -1 when absent.
    int sheet_index_of(std::string_view name) const;

    bool operator==(const Workbook&) const = default;
};

// s1: count of stored cells across all worksheets.
long long non_empty_cell_count(const Workbook& wb);

// s2: worksheets holding at least one cell.
int nonempty_worksheet_count(const Workbook& wb);

// Case-insensitive comparison used for sheet names (ASCII fold).
bool sheet_name_equal(std::string_view a, std::string_view b);
std::string ascii_upper(std::string_view s);

}  // namespace sheetscan
