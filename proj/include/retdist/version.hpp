#pragma once

namespace retdist {

inline constexpr const char* kToolName = "retdist";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace retdist
