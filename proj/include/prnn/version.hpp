#pragma once

namespace prnn {

inline constexpr const char* kToolName = "prnn";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace prnn
