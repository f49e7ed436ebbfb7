#pragma once

namespace detint {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace detint
