#pragma once

namespace ringpol {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ringpol
