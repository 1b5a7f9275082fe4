#pragma once

namespace qdev {

inline constexpr const char* kToolName = "qdevkit";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace qdev
