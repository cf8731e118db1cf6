#pragma once

#include <string_view>

namespace heurreg {

inline constexpr std::string_view k_version = "0.1.0";

// Identification line written into every output header.
inline constexpr std::string_view k_version_line = "heurreg 0.1.0";

} // namespace heurreg
