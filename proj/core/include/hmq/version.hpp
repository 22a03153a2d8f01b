#pragma once

namespace hmq {

inline constexpr const char* version = "0.1.0";

}  // namespace hmq
