#include "sheetscan/cellref.hpp"

#include <cctype>

namespace sheetscan {

std::optional<int> letters_to_col(std::string_view letters) {
    if (letters.empty() || letters.size() > 3) return std::nullopt;
    int col = 0;
    for (char ch : letters) {
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (ch < 'A' || ch > 'Z') return std::nullopt;
        col = col * 26 + (ch - 'A' + 1);
    }
    if (col < 1 || col > kMaxCol) return std::nullopt;
    return col;
}

std::string col_to_letters(int col) {
    std::string out;
    while (col > 0) {
        int rem = (col - 1) % 26;
        out.insert(out.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return out;
}

std::optional<RowCol> parse_plain_a1(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() &&
           std::isalpha(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    if (i == 0 || i == text.size()) return std::nullopt;
    auto col = letters_to_col(text.substr(0, i));
    if (!col) return std::nullopt;
    long long row = 0;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        row = row * 10 + (text[j] - '0');
        if (row > kMaxRow) return std::nullopt;
        ++j;
    }
    if (j != text.size() || j == i || row < 1) return std::nullopt;
    return RowCol{static_cast<int>(row), *col};
}

std::optional<CellRange> parse_plain_range(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        auto rc = parse_plain_a1(text);
        if (!rc) return std::nullopt;
        return CellRange{rc->row, rc->col, rc->row, rc->col};
    }
    auto a = parse_plain_a1(text.substr(0, colon));
    auto b = parse_plain_a1(text.substr(colon + 1));
    if (!a || !b) return std::nullopt;
    CellRange r;
    r.r1 = std::min(a->row, b->row);
    r.r2 = std::max(a->row, b->row);
    r.c1 = std::min(a->col, b->col);
    r.c2 = std::max(a->col, b->col);
    return r;
}

std::string rowcol_to_a1(RowCol rc) {
    return col_to_letters(rc.col) + std::to_string(rc.row);
}

std::string range_to_a1(const CellRange& r) {
    if (r.r1 == r.r2 && r.c1 == r.c2) return rowcol_to_a1({r.r1, r.c1});
    return rowcol_to_a1({r.r1, r.c1}) + ":" + rowcol_to_a1({r.r2, r.c2});
}

}  // namespace sheetscan
