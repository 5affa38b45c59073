#pragma once

namespace spms {

inline constexpr const char* kVersion = "spms 0.1.0";

}  // namespace spms
