#pragma once

namespace gaudit {
inline constexpr const char* kToolkitVersion = "0.1.0";
}
