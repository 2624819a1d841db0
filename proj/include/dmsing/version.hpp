#pragma once

namespace dmsing {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dmsing
