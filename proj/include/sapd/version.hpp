#pragma once

namespace sapd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sapd
