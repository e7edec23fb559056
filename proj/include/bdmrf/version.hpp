#pragma once

namespace bdmrf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bdmrf
