#pragma once

namespace svh {

inline constexpr const char* kVersion = "0.1.0";

} // namespace svh
