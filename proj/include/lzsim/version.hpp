#pragma once

namespace lzsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lzsim
