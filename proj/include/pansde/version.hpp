#pragma once

namespace pansde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pansde
