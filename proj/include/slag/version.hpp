#pragma once

namespace slag {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace slag
