#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sheetscan/workbook.hpp"

namespace sheetscan {

struct XlsxSourceInfo {
    std::string path;  // filled by the caller
    int sheet_count = 0;
    std::vector<std::string> parse_warnings;
};

// Loads a .xlsx byte buffer: cached values and formula text only, no
// evaluation. Shared formulas are expanded per cell by shifting relative
// references from the master. Structural problems (not a ZIP, no workbook
// part) throw UnreadableFileError; malformed individual cells become
// warnings and are dropped.
std::pair<Workbook, XlsxSourceInfo> load_xlsx(std::string_view bytes);

}  // namespace sheetscan
