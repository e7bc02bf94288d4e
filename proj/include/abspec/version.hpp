#pragma once

namespace abspec {

inline constexpr const char* kVersion = "0.1.0";

} // namespace abspec
