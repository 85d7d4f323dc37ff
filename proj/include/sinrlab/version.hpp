#pragma once

namespace sinrlab {
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigVersion = 1;
}  // namespace sinrlab
