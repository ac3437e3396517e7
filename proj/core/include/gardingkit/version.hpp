#pragma once

namespace gk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gk
