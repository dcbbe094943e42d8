#pragma once

namespace opalg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opalg
