#pragma once

namespace chgrow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chgrow
