#pragma once

namespace dla {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dla
