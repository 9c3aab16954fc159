#pragma once

namespace d2k {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace d2k
