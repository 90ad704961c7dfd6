#pragma once

namespace linkforge {

inline constexpr const char* kToolName = "linkforge";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace linkforge
