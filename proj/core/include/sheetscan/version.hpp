#pragma once

namespace sheetscan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sheetscan
