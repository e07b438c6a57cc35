#pragma once

namespace netembed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace netembed
