#pragma once

namespace projsel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace projsel
