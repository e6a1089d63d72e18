#pragma once

namespace defm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace defm
