#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sheetscan {

// Excel sheet geometry. Columns are 1-based (A=1), rows 1-based.
inline constexpr int kMaxCol = 16384;    // column XFD
inline constexpr int kMaxRow = 1048576;

// Position of a cell within a worksheet.
struct RowCol {
    int row = 0;
    int col = 0;

    auto operator<=>(const RowCol&) const = default;
};

// Fully qualified cell position within a workbook. sheet_index is the
// 0-based ordinal of the worksheet.
struct CellAddress {
    int sheet_index = 0;
    int row = 1;
    int col = 1;

    auto operator<=>(const CellAddress&) const = default;
};

// Inclusive rectangular range of cells, normalized so r1 <= r2, c1 <= c2.
struct CellRange {
    int r1 = 0;
    int c1 = 0;
    int r2 = 0;
    int c2 = 0;

    auto operator<=>(const CellRange&) const = default;

    bool contains(RowCol rc) const {
        return rc.row >= r1 && rc.row <= r2 && rc.col >= c1 && rc.col <= c2;
    }
    bool intersects(const CellRange& o) const {
        return r1 <= o.r2 && o.r1 <= r2 && c1 <= o.c2 && o.c1 <= c2;
    }
    long long area() const {
        return static_cast<long long>(r2 - r1 + 1) * (c2 - c1 + 1);
    }
};

// "A" -> 1, "XFD" -> 16384. Empty or out-of-range input -> nullopt.
std::optional<int> letters_to_col(std::string_view letters);

// 1 -> "A", 16384 -> "XFD". Requires col >= 1.
std::string col_to_letters(int col);

// Parses a plain A1-style address ("B12", uppercase or lowercase, no $).
std::optional<RowCol> parse_plain_a1(std::string_view text);

// Parses an "A1:B2"-style range string; a single address is a 1x1 range.
// Corners are normalized.
std::optional<CellRange> parse_plain_range(std::string_view text);

std::string rowcol_to_a1(RowCol rc);
std::string range_to_a1(const CellRange& r);

}  // namespace sheetscan
