#pragma once

#include <string>
#include <string_view>

#include "sheetscan/workbook.hpp"

namespace sheetscan {

// Loads the canonical UTF-8 JSON workbook format:
//
//   {"name": <string>,
//    "worksheets": [
//      {"name": <string>,
//       "merged": ["A1:B2", ...],
//       "cells": [{"addr": "A1",
//                  "value": <number|string|bool|{"error": "#REF!"}|null>,
//                  "formula": <string-without-'='|null>}, ...]}, ...]}
//
// Unknown top-level keys are ignored; unknown keys inside a cell object
// are a FormatError. Throws FormatError / IntegrityError.
Workbook load_canonical(std::string_view bytes);

// Serializes back to the canonical format. load_canonical of the result
// compares equal to the source workbook.
std::string serialize_canonical(const Workbook& wb);

}  // namespace sheetscan
