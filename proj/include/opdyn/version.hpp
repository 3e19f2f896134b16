#pragma once

namespace opdyn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opdyn
