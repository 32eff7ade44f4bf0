#pragma once

namespace bellsim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace bellsim
