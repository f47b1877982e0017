#pragma once

namespace rcsync {

inline constexpr const char* kToolName = "rcsync";
inline constexpr const char* kToolVersion = "1.0.0";

} // namespace rcsync
