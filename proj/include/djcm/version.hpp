#pragma once

namespace djcm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace djcm
