#pragma once

namespace egonet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace egonet
