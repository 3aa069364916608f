#include "sheetscan/workbook.hpp"

#include <array>
#include <cctype>

namespace sheetscan {

bool is_known_error_code(std::string_view code) {
    static constexpr std::array<std::string_view, 10> kCodes = {
        "#NULL!", "#DIV/0!",        "#VALUE!", "#REF!",  "#NAME?",
        "#NUM!",  "#N/A",           "#SPILL!", "#CALC!", "#GETTING_DATA",
    };
    for (auto c : kCodes) {
        if (c == code) return true;
    }
    return false;
}

const CellRange* Worksheet::merged_region_at(RowCol rc) const {
    for (const auto& r : merged_regions) {
        if (r.contains(rc)) return &r;
    }
    return nullptr;
}

std::string ascii_upper(std::string_view s) {
    std::string out(s);
    for (char& ch : out) {
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    return out;
}

bool sheet_name_equal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(a[i])) !=
            std::toupper(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

int Workbook::sheet_index_of(std::string_view name) const {
    for (std::size_t i = 0; i < worksheets.size(); ++i) {
        if (sheet_name_equal(worksheets[i].name, name)) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

long long non_empty_cell_count(const Workbook& wb) {
    long long n = 0;
    for (const auto& ws : wb.worksheets) {
        n += static_cast<long long>(ws.cells.size());
    }
    return n;
}

int nonempty_worksheet_count(const Workbook& wb) {
    int n = 0;
    for (const auto& ws : wb.worksheets) {
        if (!ws.empty()) ++n;
    }
    return n;
}

}  // namespace sheetscan
