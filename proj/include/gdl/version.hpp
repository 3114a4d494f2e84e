#pragma once

namespace gdl {

inline constexpr const char* kVersion = "0.3.1";

}  // namespace gdl
