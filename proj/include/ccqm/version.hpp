#pragma once

namespace ccqm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ccqm
