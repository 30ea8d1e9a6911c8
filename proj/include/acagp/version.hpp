#pragma once

namespace acagp {

inline constexpr const char* version = "0.1.0";

} // namespace acagp
